#pragma once

// One-dimensional grids: the periodic circle [0, 2pi) and closed intervals [a, b] with both
// endpoints as nodes (Dirichlet values are pinned by the problems that use them).

#include "equideform/core.hpp"

#include <cmath>

namespace equideform
{
	enum class GridKind
	{
		Periodic,
		Dirichlet
	};

	enum class DiffOrder
	{
		Second = 2,
		Fourth = 4,
		Spectral = 0
	};

	struct Grid
	{
		GridKind kind = GridKind::Periodic;
		DiffOrder order = DiffOrder::Spectral;
		double a = 0;
		double b = 0;
		Vector nodes;
		Matrix diff1;
		Matrix diff2;
		Vector quad;

		int size() const { return static_cast<int>(nodes.size()); }
		double length() const { return b - a; }
	};

	Grid build_grid(GridKind kind, int N, DiffOrder order, double a = 0.0, double b = 0.0);
	Grid periodic_grid(int N, DiffOrder order = DiffOrder::Spectral);
	Grid dirichlet_grid(int N, double a, double b, DiffOrder order = DiffOrder::Fourth);

	// Finite-difference weights for derivatives 0..max_deriv at x0 from the given nodes.
	// Row m of the result holds the weights of the m-th derivative.
	Matrix fornberg_weights(double x0, const Vector &nodes, int max_deriv);

	struct Pairing
	{
		Vector weights;

		double inner(const Vector &u, const Vector &v) const { return u.dot(weights.cwiseProduct(v)); }
		double norm(const Vector &u) const { return std::sqrt(inner(u, u)); }
	};

	Pairing pairing_weights(const Grid &grid, const Vector &background_density);
	Pairing pairing_weights(const Grid &grid);

	Vector diff_apply(const Grid &grid, int order, const Vector &field);

	// Trigonometric interpolant of nodal values on a periodic grid; the Nyquist mode of an even
	// grid is split symmetrically as cos(N x / 2).
	class TrigInterpolant
	{
	public:
		TrigInterpolant(const Grid &grid, const Vector &values);

		double operator()(double x) const;
		double derivative(double x) const;

	private:
		double mean_ = 0;
		Vector cos_, sin_; // coefficients of cos(k x), sin(k x) for k = 1..K
		double nyquist_ = 0;
		int N_ = 0;
	};

	// Matrices mapping nodal values to values and derivatives at quadrature points, with weights.
	// Spectral periodic grids are oversampled twice so that the discrete Dirichlet form sees the
	// Nyquist mode; other grids use the nodes themselves.
	struct QuadratureOperators
	{
		Vector points;
		Matrix P;
		Matrix Pd;
		Vector w;
	};

	QuadratureOperators quadrature_operators(const Grid &grid);
} // namespace equideform
