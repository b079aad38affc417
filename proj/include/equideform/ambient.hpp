#pragma once

// Riemannian ambient models used by the variational problems:
//   SpaceForm2(lambda)   geodesic polar chart (r, theta), metric dr^2 + sn_lambda(r)^2 dtheta^2
//   ProductM2kR(k)       chart (r, theta, z), metric dr^2 + sn_k(r)^2 dtheta^2 + dz^2
//   FlatTorus(Q)         chart (x, y) with period 1 in both, constant metric Q
//   ScaledSphere(lambda) chart (vartheta, phi), metric (1/lambda)(dvartheta^2 + sin^2 vartheta dphi^2)

#include "equideform/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace equideform
{
	struct SnValue
	{
		double value;
		double derivative;
	};

	// sin(sqrt(l) r)/sqrt(l), r, sinh(sqrt(-l) r)/sqrt(-l) and the r-derivative; a common
	// series is used for |lambda| r^2 < 1e-4 so that the result is smooth across lambda = 0.
	SnValue sn_lambda(double lambda, double r);

	// int_0^r sn_lambda = 2 sn_lambda(r/2)^2
	double sn_area_primitive(double lambda, double r);

	// Inverse of sn_lambda on its increasing branch.
	double sn_inverse(double lambda, double s);

	// Largest radius admitted in the polar chart; keeps a margin from the antipode when lambda > 0.
	double polar_radius_limit(double lambda);

	constexpr double polar_radius_floor = 0.05;

	enum class AmbientKind
	{
		SpaceForm2,
		ProductM2kR,
		FlatTorus,
		ScaledSphere
	};

	struct AmbientModel
	{
		AmbientKind kind = AmbientKind::SpaceForm2;
		double lambda = 0; // curvature, product curvature k or sphere scale
		Matrix Q;          // Gram matrix of the flat torus
		std::vector<std::string> coordinate_names;
		std::vector<double> periods; // 0 for a non-periodic coordinate

		static AmbientModel space_form(double lambda);
		static AmbientModel product(double k);
		static AmbientModel flat_torus(const Matrix &Q);
		static AmbientModel scaled_sphere(double lambda);

		int dim() const { return static_cast<int>(coordinate_names.size()); }
		std::string kind_name() const;
	};

	struct ChartPoint
	{
		Vector coords;

		ChartPoint() = default;
		ChartPoint(Vector c) : coords(std::move(c)) {}
		ChartPoint(std::initializer_list<double> c) : coords(Eigen::Map<const Vector>(c.begin(), c.size())) {}
	};

	struct TangentVectorField
	{
		std::string name;
		std::function<Vector(const Vector &)> eval;

		Vector operator()(const ChartPoint &p) const { return eval(p.coords); }
	};

	Matrix metric_at(const AmbientModel &model, const ChartPoint &p);

	// Closed-form Killing fields. SpaceForm2 order matches algebra_basis(lambda, 2):
	// rotation, then the translations along e_1 and e_2.
	std::vector<TangentVectorField> killing_fields(const AmbientModel &model);
	std::vector<Vector> killing_fields_at(const AmbientModel &model, const ChartPoint &p);

	// Frobenius norm of the central-difference Lie derivative L_K g at p.
	double killing_residual(const AmbientModel &model, const TangentVectorField &field, const ChartPoint &p,
	                        double h);

	// Max deviation between the structure constants of the chart Killing fields (vector-field
	// brackets by central differences) and those of algebra_basis(lambda, 2). The fields are the
	// fundamental fields of a left action, so [K_a, K_b] = -sum_c C_ab^c K_c.
	double structure_match(double lambda, const ChartPoint &p, double h);

	// Isometric embedding of the polar chart in the quadric x_0^2 + lambda |x|^2 = 1, on which
	// exp(L_lambda(D, u)) acts linearly.
	Eigen::Vector3d polar_to_quadric(double lambda, double r, double theta);
	// Returns (r, theta) with theta in (-pi, pi].
	Eigen::Vector2d quadric_to_polar(double lambda, const Eigen::Vector3d &x);
} // namespace equideform
