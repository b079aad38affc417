#include "equideform/mesh.hpp"

#include <cmath>
#include <string>

namespace equideform
{
	Matrix fornberg_weights(double x0, const Vector &x, int max_deriv)
	{
		const int n = static_cast<int>(x.size());
		Matrix c = Matrix::Zero(max_deriv + 1, n);
		double c1 = 1.0;
		double c4 = x(0) - x0;
		c(0, 0) = 1.0;
		for (int i = 1; i < n; ++i)
		{
			const int mn = std::min(i, max_deriv);
			double c2 = 1.0;
			const double c5 = c4;
			c4 = x(i) - x0;
			for (int j = 0; j < i; ++j)
			{
				const double c3 = x(i) - x(j);
				c2 *= c3;
				if (j == i - 1)
				{
					for (int k = mn; k >= 1; --k)
						c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
					c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
				}
				for (int k = mn; k >= 1; --k)
					c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
				c(0, j) = c4 * c(0, j) / c3;
			}
			c1 = c2;
		}
		return c;
	}

	namespace
	{
		void spectral_periodic(Grid &g, int N)
		{
			const double h = 2 * M_PI / N;
			g.diff1 = Matrix::Zero(N, N);
			g.diff2 = Matrix::Zero(N, N);
			for (int i = 0; i < N; ++i)
				for (int j = 0; j < N; ++j)
				{
					if (i == j)
					{
						g.diff2(i, j) = N % 2 == 0 ? -M_PI * M_PI / (3 * h * h) - 1.0 / 6.0 : -(N * N - 1.0) / 12.0;
						continue;
					}
					const int k = i - j;
					const double sign = (k % 2 == 0) ? 1.0 : -1.0;
					const double half = 0.5 * k * h;
					if (N % 2 == 0)
					{
						g.diff1(i, j) = 0.5 * sign / std::tan(half);
						g.diff2(i, j) = -0.5 * sign / (std::sin(half) * std::sin(half));
					}
					else
					{
						g.diff1(i, j) = 0.5 * sign / std::sin(half);
						g.diff2(i, j) = -0.5 * sign / (std::sin(half) * std::tan(half));
					}
				}
		}

		void fd_periodic(Grid &g, int N, int order)
		{
			const int half = order / 2;
			const double h = 2 * M_PI / N;
			Vector offsets(2 * half + 1);
			for (int m = -half; m <= half; ++m)
				offsets(m + half) = m * h;
			const Matrix w = fornberg_weights(0.0, offsets, 2);
			g.diff1 = Matrix::Zero(N, N);
			g.diff2 = Matrix::Zero(N, N);
			for (int i = 0; i < N; ++i)
				for (int m = -half; m <= half; ++m)
				{
					const int j = ((i + m) % N + N) % N;
					g.diff1(i, j) += w(1, m + half);
					g.diff2(i, j) += w(2, m + half);
				}
		}

		// Window of `width` consecutive nodes as centred on i as the interval allows.
		int window_start(int i, int width, int N)
		{
			return std::clamp(i - width / 2, 0, N - width);
		}

		void fd_dirichlet(Grid &g, int N, int order)
		{
			g.diff1 = Matrix::Zero(N, N);
			g.diff2 = Matrix::Zero(N, N);
			const int w1 = std::min(order + 1, N);
			for (int i = 0; i < N; ++i)
			{
				int s = window_start(i, w1, N);
				Vector local = g.nodes.segment(s, w1);
				g.diff1.block(i, s, 1, w1) = fornberg_weights(g.nodes(i), local, 1).row(1);

				// a centred stencil of order + 1 nodes keeps the order for the second derivative,
				// a one-sided one needs an extra node
				const bool centred = i - order / 2 >= 0 && i + order / 2 < N;
				const int w2 = std::min(centred ? order + 1 : order + 2, N);
				s = window_start(i, w2, N);
				local = g.nodes.segment(s, w2);
				g.diff2.block(i, s, 1, w2) = fornberg_weights(g.nodes(i), local, 2).row(2);
			}

			const double h = (g.b - g.a) / (N - 1);
			g.quad = Vector::Zero(N);
			if (order == 2)
			{
				g.quad.setConstant(h);
				g.quad(0) = g.quad(N - 1) = 0.5 * h;
				return;
			}
			const int intervals = N - 1;
			const int simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
			for (int j = 0; j < simpson_end; j += 2)
			{
				g.quad(j) += h / 3;
				g.quad(j + 1) += 4 * h / 3;
				g.quad(j + 2) += h / 3;
			}
			if (simpson_end != intervals)
			{
				const int j = simpson_end;
				g.quad(j) += 3 * h / 8;
				g.quad(j + 1) += 9 * h / 8;
				g.quad(j + 2) += 9 * h / 8;
				g.quad(j + 3) += 3 * h / 8;
			}
		}
	} // namespace

	Grid build_grid(GridKind kind, int N, DiffOrder order, double a, double b)
	{
		Grid g;
		g.kind = kind;
		g.order = order;
		if (kind == GridKind::Periodic)
		{
			if (N < 8)
				throw PreconditionError("build_grid: periodic grids need N >= 8");
			g.a = 0;
			g.b = 2 * M_PI;
			g.nodes = Vector::LinSpaced(N, 0.0, 2 * M_PI * (N - 1) / N);
			g.quad = Vector::Constant(N, 2 * M_PI / N);
			if (order == DiffOrder::Spectral)
				spectral_periodic(g, N);
			else
				fd_periodic(g, N, static_cast<int>(order));
			return g;
		}
		if (order == DiffOrder::Spectral)
			throw UnsupportedError("build_grid: spectral differentiation is only available on periodic grids");
		if (N < 4)
			throw PreconditionError("build_grid: Dirichlet grids need N >= 4");
		if (!(b > a))
			throw DomainError("build_grid: Dirichlet interval needs b > a");
		g.a = a;
		g.b = b;
		g.nodes = Vector::LinSpaced(N, a, b);
		fd_dirichlet(g, N, static_cast<int>(order));
		return g;
	}

	Grid periodic_grid(int N, DiffOrder order) { return build_grid(GridKind::Periodic, N, order); }

	Grid dirichlet_grid(int N, double a, double b, DiffOrder order)
	{
		return build_grid(GridKind::Dirichlet, N, order, a, b);
	}

	Pairing pairing_weights(const Grid &grid, const Vector &background_density)
	{
		if (background_density.size() != grid.size())
			throw ShapeError("pairing_weights: density length does not match the grid");
		if ((background_density.array() <= 0).any())
			throw DomainError("pairing_weights: background density must be positive");
		return {grid.quad.cwiseProduct(background_density)};
	}

	Pairing pairing_weights(const Grid &grid) { return {grid.quad}; }

	Vector diff_apply(const Grid &grid, int order, const Vector &field)
	{
		if (field.size() != grid.size())
			throw ShapeError("diff_apply: field length " + std::to_string(field.size()) + " does not match grid size " +
			                 std::to_string(grid.size()));
		if (order == 1)
			return grid.diff1 * field;
		if (order == 2)
			return grid.diff2 * field;
		throw PreconditionError("diff_apply: order must be 1 or 2");
	}

	TrigInterpolant::TrigInterpolant(const Grid &grid, const Vector &values)
	{
		if (grid.kind != GridKind::Periodic)
			throw UnsupportedError("TrigInterpolant: periodic grids only");
		if (values.size() != grid.size())
			throw ShapeError("TrigInterpolant: value count does not match grid");
		N_ = grid.size();
		const int K = (N_ - 1) / 2;
		mean_ = values.mean();
		cos_.resize(K);
		sin_.resize(K);
		for (int k = 1; k <= K; ++k)
		{
			cos_(k - 1) = 2.0 / N_ * (values.array() * (k * grid.nodes.array()).cos()).sum();
			sin_(k - 1) = 2.0 / N_ * (values.array() * (k * grid.nodes.array()).sin()).sum();
		}
		if (N_ % 2 == 0)
			nyquist_ = 1.0 / N_ * (values.array() * (0.5 * N_ * grid.nodes.array()).cos()).sum();
	}

	double TrigInterpolant::operator()(double x) const
	{
		double out = mean_;
		for (int k = 1; k <= cos_.size(); ++k)
			out += cos_(k - 1) * std::cos(k * x) + sin_(k - 1) * std::sin(k * x);
		if (N_ % 2 == 0)
			out += nyquist_ * std::cos(0.5 * N_ * x);
		return out;
	}

	double TrigInterpolant::derivative(double x) const
	{
		double out = 0;
		for (int k = 1; k <= cos_.size(); ++k)
			out += k * (sin_(k - 1) * std::cos(k * x) - cos_(k - 1) * std::sin(k * x));
		if (N_ % 2 == 0)
			out -= 0.5 * N_ * nyquist_ * std::sin(0.5 * N_ * x);
		return out;
	}

	QuadratureOperators quadrature_operators(const Grid &grid)
	{
		const int N = grid.size();
		if (grid.kind != GridKind::Periodic || grid.order != DiffOrder::Spectral)
			return {grid.nodes, Matrix::Identity(N, N), grid.diff1, grid.quad};

		// cardinal function of the trigonometric interpolant and its derivative
		const int K = (N - 1) / 2;
		auto cardinal = [N, K](double x, double &value, double &slope) {
			value = 1.0;
			slope = 0.0;
			for (int k = 1; k <= K; ++k)
			{
				value += 2 * std::cos(k * x);
				slope -= 2 * k * std::sin(k * x);
			}
			if (N % 2 == 0)
			{
				value += std::cos(0.5 * N * x);
				slope -= 0.5 * N * std::sin(0.5 * N * x);
			}
			value /= N;
			slope /= N;
		};

		const int M = 2 * N;
		QuadratureOperators ops;
		ops.P.resize(M, N);
		ops.Pd.resize(M, N);
		ops.points = Vector::LinSpaced(M, 0.0, 2 * M_PI * (M - 1) / M);
		ops.w = Vector::Constant(M, 2 * M_PI / M);
		// P is circulant in the offset between quadrature point and node
		Vector value(M), slope(M);
		for (int m = 0; m < M; ++m)
			cardinal(2 * M_PI * m / M, value(m), slope(m));
		for (int q = 0; q < M; ++q)
			for (int j = 0; j < N; ++j)
			{
				const int offset = ((q - 2 * j) % M + M) % M;
				ops.P(q, j) = value(offset);
				ops.Pd(q, j) = slope(offset);
			}
		return ops;
	}
} // namespace equideform
