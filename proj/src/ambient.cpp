#include "equideform/ambient.hpp"
#include "equideform/lie_bundle.hpp"

#include <cmath>

namespace equideform
{
	SnValue sn_lambda(double lambda, double r)
	{
		const double x = lambda * r * r;
		if (std::abs(x) < 1e-4)
		{
			const double value = r * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0);
			const double derivative = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0;
			return {value, derivative};
		}
		if (lambda > 0)
		{
			const double s = std::sqrt(lambda);
			return {std::sin(s * r) / s, std::cos(s * r)};
		}
		const double s = std::sqrt(-lambda);
		return {std::sinh(s * r) / s, std::cosh(s * r)};
	}

	double sn_area_primitive(double lambda, double r)
	{
		const double half = sn_lambda(lambda, 0.5 * r).value;
		return 2.0 * half * half;
	}

	double sn_inverse(double lambda, double s)
	{
		if (lambda == 0)
			return s;
		if (lambda > 0)
		{
			const double q = std::sqrt(lambda);
			if (q * s > 1.0)
				throw DomainError("sn_inverse: value exceeds the range of sn_lambda");
			return std::asin(q * s) / q;
		}
		const double q = std::sqrt(-lambda);
		return std::asinh(q * s) / q;
	}

	double polar_radius_limit(double lambda)
	{
		if (lambda > 0)
			return 0.95 * M_PI / std::sqrt(lambda);
		if (lambda < 0)
			return std::min(50.0, 30.0 / std::sqrt(-lambda));
		return 50.0;
	}

	AmbientModel AmbientModel::space_form(double lambda)
	{
		AmbientModel m;
		m.kind = AmbientKind::SpaceForm2;
		m.lambda = lambda;
		m.coordinate_names = {"r", "theta"};
		m.periods = {0.0, 2 * M_PI};
		return m;
	}

	AmbientModel AmbientModel::product(double k)
	{
		AmbientModel m;
		m.kind = AmbientKind::ProductM2kR;
		m.lambda = k;
		m.coordinate_names = {"r", "theta", "z"};
		m.periods = {0.0, 2 * M_PI, 0.0};
		return m;
	}

	AmbientModel AmbientModel::flat_torus(const Matrix &Q)
	{
		if (Q.rows() != 2 || Q.cols() != 2)
			throw ShapeError("flat_torus: Q must be 2 x 2");
		if ((Q - Q.transpose()).norm() != 0.0 || Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().minCoeff() <= 0)
			throw DomainError("flat_torus: Q must be symmetric positive definite");
		AmbientModel m;
		m.kind = AmbientKind::FlatTorus;
		m.Q = Q;
		m.coordinate_names = {"x", "y"};
		m.periods = {1.0, 1.0};
		return m;
	}

	AmbientModel AmbientModel::scaled_sphere(double lambda)
	{
		if (!(lambda > 0))
			throw DomainError("scaled_sphere: lambda must be positive");
		AmbientModel m;
		m.kind = AmbientKind::ScaledSphere;
		m.lambda = lambda;
		m.coordinate_names = {"vartheta", "phi"};
		m.periods = {0.0, 2 * M_PI};
		return m;
	}

	std::string AmbientModel::kind_name() const
	{
		switch (kind)
		{
		case AmbientKind::SpaceForm2:
			return "SpaceForm2";
		case AmbientKind::ProductM2kR:
			return "ProductM2kR";
		case AmbientKind::FlatTorus:
			return "FlatTorus";
		case AmbientKind::ScaledSphere:
			return "ScaledSphere";
		}
		return "unknown";
	}

	namespace
	{
		void check_point(const AmbientModel &model, const Vector &p)
		{
			if (p.size() != model.dim())
				throw ShapeError("chart point has wrong dimension");
			if ((model.kind == AmbientKind::SpaceForm2 || model.kind == AmbientKind::ProductM2kR) && !(p(0) > 0))
				throw DomainError("polar chart requires r > 0");
		}

		// Fundamental fields of rotation and the two translations in the polar chart.
		Vector polar_field(double lambda, int which, double r, double theta)
		{
			Vector K(2);
			if (which == 0)
			{
				K << 0.0, 1.0;
				return K;
			}
			const auto [sn, cs] = sn_lambda(lambda, r);
			const double c = std::cos(theta), s = std::sin(theta);
			if (which == 1)
				K << c, -cs / sn * s;
			else
				K << s, cs / sn * c;
			return K;
		}
	} // namespace

	Matrix metric_at(const AmbientModel &model, const ChartPoint &p)
	{
		check_point(model, p.coords);
		switch (model.kind)
		{
		case AmbientKind::SpaceForm2:
		{
			const double sn = sn_lambda(model.lambda, p.coords(0)).value;
			return Eigen::Vector2d(1.0, sn * sn).asDiagonal();
		}
		case AmbientKind::ProductM2kR:
		{
			const double sn = sn_lambda(model.lambda, p.coords(0)).value;
			return Eigen::Vector3d(1.0, sn * sn, 1.0).asDiagonal();
		}
		case AmbientKind::FlatTorus:
			return model.Q;
		case AmbientKind::ScaledSphere:
		{
			const double s = std::sin(p.coords(0));
			return Eigen::Vector2d(1.0 / model.lambda, s * s / model.lambda).asDiagonal();
		}
		}
		throw UnsupportedError("metric_at: unknown model");
	}

	std::vector<TangentVectorField> killing_fields(const AmbientModel &model)
	{
		const double lambda = model.lambda;
		std::vector<TangentVectorField> out;
		switch (model.kind)
		{
		case AmbientKind::SpaceForm2:
		case AmbientKind::ProductM2kR:
		{
			const bool product = model.kind == AmbientKind::ProductM2kR;
			const char *names[] = {"rotation", "translation_1", "translation_2"};
			for (int which = 0; which < 3; ++which)
				out.push_back({names[which], [lambda, which, product](const Vector &p) {
					               const Vector K = polar_field(lambda, which, p(0), p(1));
					               if (!product)
						               return K;
					               Vector K3(3);
					               K3 << K, 0.0;
					               return K3;
				               }});
			if (product)
				out.push_back({"vertical", [](const Vector &) { return Vector(Vector::Unit(3, 2)); }});
			break;
		}
		case AmbientKind::FlatTorus:
			out.push_back({"translation_x", [](const Vector &) { return Vector(Vector::Unit(2, 0)); }});
			out.push_back({"translation_y", [](const Vector &) { return Vector(Vector::Unit(2, 1)); }});
			break;
		case AmbientKind::ScaledSphere:
			// e_i x p for the unit sphere, written in (vartheta, phi)
			out.push_back({"rotation_x", [](const Vector &p) {
				               Vector K(2);
				               K << -std::sin(p(1)), -std::cos(p(0)) / std::sin(p(0)) * std::cos(p(1));
				               return K;
			               }});
			out.push_back({"rotation_y", [](const Vector &p) {
				               Vector K(2);
				               K << std::cos(p(1)), -std::cos(p(0)) / std::sin(p(0)) * std::sin(p(1));
				               return K;
			               }});
			out.push_back({"rotation_z", [](const Vector &) { return Vector(Vector::Unit(2, 1)); }});
			break;
		}
		return out;
	}

	std::vector<Vector> killing_fields_at(const AmbientModel &model, const ChartPoint &p)
	{
		check_point(model, p.coords);
		std::vector<Vector> out;
		for (const auto &K : killing_fields(model))
			out.push_back(K(p));
		return out;
	}

	double killing_residual(const AmbientModel &model, const TangentVectorField &field, const ChartPoint &p,
	                        double h)
	{
		if (!(h > 0))
			throw PreconditionError("killing_residual: step must be positive");
		check_point(model, p.coords);
		const int d = model.dim();
		const Matrix g = metric_at(model, p);
		const Vector K = field(p);
		std::vector<Matrix> dg(d);
		Matrix dK(d, d); // dK(k, i) = d_i K^k
		for (int i = 0; i < d; ++i)
		{
			Vector plus = p.coords, minus = p.coords;
			plus(i) += h;
			minus(i) -= h;
			dg[i] = (metric_at(model, plus) - metric_at(model, minus)) / (2 * h);
			dK.col(i) = (field.eval(plus) - field.eval(minus)) / (2 * h);
		}
		Matrix L = g.transpose() * dK + dK.transpose() * g;
		for (int k = 0; k < d; ++k)
			L += K(k) * dg[k];
		return L.norm();
	}

	double structure_match(double lambda, const ChartPoint &p, double h)
	{
		const AmbientModel model = AmbientModel::space_form(lambda);
		const auto fields = killing_fields(model);
		const std::vector<Vector> points = {p.coords, p.coords + Eigen::Vector2d(0.05, 0.0),
		                                    p.coords + Eigen::Vector2d(0.0, 0.3)};
		for (const auto &q : points)
			check_point(model, q);

		auto jacobian = [&](const TangentVectorField &F, const Vector &q) {
			Matrix J(2, 2);
			for (int i = 0; i < 2; ++i)
			{
				Vector plus = q, minus = q;
				plus(i) += h;
				minus(i) -= h;
				J.col(i) = (F.eval(plus) - F.eval(minus)) / (2 * h);
			}
			return J;
		};

		Matrix stacked(2 * points.size(), 3);
		for (std::size_t j = 0; j < points.size(); ++j)
			for (int c = 0; c < 3; ++c)
				stacked.block(2 * j, c, 2, 1) = fields[c].eval(points[j]);
		const auto qr = stacked.colPivHouseholderQr();

		const auto matrices = algebra_basis(lambda, 2).matrices();
		double worst = 0;
		for (int a = 0; a < 3; ++a)
			for (int b = a + 1; b < 3; ++b)
			{
				Vector rhs(2 * points.size());
				for (std::size_t j = 0; j < points.size(); ++j)
				{
					const Vector &q = points[j];
					rhs.segment(2 * j, 2) = jacobian(fields[b], q) * fields[a].eval(q) -
					                        jacobian(fields[a], q) * fields[b].eval(q);
				}
				const Vector fitted = qr.solve(rhs);
				const Matrix comm = matrices[a] * matrices[b] - matrices[b] * matrices[a];
				const Vector C = basis_coordinates(matrices, comm);
				worst = std::max(worst, (fitted + C).cwiseAbs().maxCoeff());
			}
		return worst;
	}

	Eigen::Vector3d polar_to_quadric(double lambda, double r, double theta)
	{
		const auto [sn, cs] = sn_lambda(lambda, r);
		return {cs, sn * std::cos(theta), sn * std::sin(theta)};
	}

	Eigen::Vector2d quadric_to_polar(double lambda, const Eigen::Vector3d &x)
	{
		const double rho = x.tail<2>().norm();
		double r;
		if (lambda > 0)
		{
			const double q = std::sqrt(lambda);
			r = std::atan2(q * rho, x(0)) / q;
		}
		else
			r = sn_inverse(lambda, rho);
		return {r, std::atan2(x(2), x(1))};
	}
} // namespace equideform
