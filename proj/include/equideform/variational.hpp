#pragma once

// Discretized invariant functionals and their exact discrete derivatives.
//
//   CmcCircle       radial graph r(theta) in SpaceForm2(lambda), f = Length - H * EnclosedArea
//   CmcProfile      profile rho(z) of a surface of revolution in ProductM2kR(k) with both
//                   boundary radii pinned, f = Area - H * EnclosedVolume
//   HarmonicTorus   maps S^1 -> (T^2, Q(t)), Q(t) = (1 - t) Q0 + t Q1, in homotopy class (p, q)
//   HarmonicSphere  maps S^1 -> sphere of curvature lambda, winding once in longitude
//
// The functionals are quadrature sums over the grid, and residual/jacobi are the exact gradient and
// Hessian of those sums divided by the pairing weights, so W * J is symmetric by construction.
// With the orientation used here a critical circle has geodesic curvature H, and the circle residual
// approximates (kappa - H) * sn_lambda(r).
//
// The unknowns of a state are all nodal values except pinned Dirichlet ends ("dofs"). Harmonic maps
// store the chart components block-wise, unwrapped along the winding direction; the domain circle
// is parametrized by s in [0, 2pi) and normalized so that the energy is that of a map from R/Z.

#include "equideform/ambient.hpp"
#include "equideform/mesh.hpp"

#include <map>
#include <string>
#include <vector>

namespace equideform
{
	enum class InstanceKind
	{
		CmcCircle,
		CmcProfile,
		HarmonicTorus,
		HarmonicSphere
	};

	struct Problem
	{
		InstanceKind kind = InstanceKind::CmcCircle;
		Grid grid;
		double H = 0;
		double radius_lo = 1; // CmcProfile boundary radii at grid.a and grid.b
		double radius_hi = 1;
		int p = 1; // HarmonicTorus homotopy class
		int q = 0;
		Matrix Q0, Q1;
		QuadratureOperators ops; // cached from grid

		static Problem cmc_circle(double H, const Grid &grid);
		static Problem cmc_profile(double H, const Grid &grid, double radius_lo, double radius_hi);
		static Problem harmonic_torus(int p, int q, const Grid &grid, const Matrix &Q0, const Matrix &Q1);
		static Problem harmonic_sphere(const Grid &grid);

		AmbientModel ambient(double lambda_hat) const;
		std::string name() const;
		int components() const;
		int dof_count() const;
		// Number of motion parameters accepted by apply_motion (ambient Killing fields, plus the
		// domain rotation for harmonic maps).
		int motion_dim() const;
	};

	struct ProblemState
	{
		Vector values;
	};

	struct JacobiOperator
	{
		Matrix matrix;
		Pairing pairing;
		double lambda_hat = 0;

		Matrix weighted() const { return pairing.weights.asDiagonal() * matrix; }
	};

	Vector state_dofs(const Problem &problem, const ProblemState &state);
	ProblemState state_from_dofs(const Problem &problem, const Vector &dofs);
	Pairing dof_pairing(const Problem &problem);

	// Throws DomainError if the state leaves the chart domain of the instance.
	void check_state(const Problem &problem, const ProblemState &state, double lambda_hat);

	double value(const Problem &problem, const ProblemState &state, double lambda_hat);
	Vector residual(const Problem &problem, const ProblemState &state, double lambda_hat);
	JacobiOperator jacobi(const Problem &problem, const ProblemState &state, double lambda_hat);

	// Columns are the Killing-Jacobi fields in dof space, ordered as the motion parameters.
	Matrix killing_jacobi_basis(const Problem &problem, const ProblemState &state, double lambda_hat);

	Vector geodesic_curvature(const Problem &problem, const ProblemState &state, double lambda_hat);

	// Acts on the state by exp(sum_i c_i X_i) for the ambient Killing generators followed by the
	// domain rotation s -> s - c_last for harmonic maps. The derivative at c = 0 in direction e_i is
	// column i of killing_jacobi_basis.
	ProblemState apply_motion(const Problem &problem, const ProblemState &state, double lambda_hat,
	                          const Vector &coeffs);

	std::map<std::string, double> derived_scalars(const Problem &problem, const ProblemState &state,
	                                              double lambda_hat);

	// Closed-form critical states: geodesic circle, straight line, equator, cylinder.
	ProblemState analytic_seed(const Problem &problem, double lambda_hat);

	// Radius of the geodesic circle with curvature H in M^2(lambda); requires H > sqrt(max(0, -lambda)).
	double geodesic_circle_radius(double lambda, double H);
} // namespace equideform
