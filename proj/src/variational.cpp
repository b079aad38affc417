#include "equideform/variational.hpp"
#include "equideform/lie_bundle.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace equideform
{
	namespace
	{
		constexpr int max_vars = 4;
		using LocalVector = Eigen::Matrix<double, max_vars, 1>;
		using LocalMatrix = Eigen::Matrix<double, max_vars, max_vars>;

		// Energy density at one quadrature point. Variables are ordered (v_1..v_c, d_1..d_c): the
		// field components and their derivatives.
		struct Local
		{
			double e = 0;
			LocalVector g = LocalVector::Zero();
			LocalMatrix h = LocalMatrix::Zero();
		};

		void circle_density(double lambda, double H, double r, double rp, Local &out)
		{
			const auto [sn, cs] = sn_lambda(lambda, r);
			const double S = std::sqrt(rp * rp + sn * sn);
			const double S3 = S * S * S;
			out.e = S - H * sn_area_primitive(lambda, r);
			out.g(0) = sn * cs / S - H * sn;
			out.g(1) = rp / S;
			out.h(0, 0) = (cs * cs - lambda * sn * sn) / S - (sn * cs) * (sn * cs) / S3 - H * cs;
			out.h(0, 1) = out.h(1, 0) = -rp * sn * cs / S3;
			out.h(1, 1) = sn * sn / S3;
		}

		void profile_density(double k, double H, double rho, double rp, Local &out)
		{
			const auto [sn, cs] = sn_lambda(k, rho);
			const double T = std::sqrt(1 + rp * rp);
			const double c = 2 * M_PI;
			out.e = c * (sn * T - H * sn_area_primitive(k, rho));
			out.g(0) = c * (cs * T - H * sn);
			out.g(1) = c * sn * rp / T;
			out.h(0, 0) = c * (-k * sn * T - H * cs);
			out.h(0, 1) = out.h(1, 0) = c * cs * rp / T;
			out.h(1, 1) = c * sn / (T * T * T);
		}

		void torus_density(const Matrix &Q, const double *d, Local &out)
		{
			const Eigen::Vector2d dv(d[0], d[1]);
			const Eigen::Matrix2d Q2 = Q;
			out.e = M_PI * dv.dot(Q2 * dv);
			out.g.tail<2>() = 2 * M_PI * Q2 * dv;
			out.h.bottomRightCorner<2, 2>() = 2 * M_PI * Q2;
		}

		void sphere_density(double lambda, const double *v, const double *d, Local &out)
		{
			const double c = M_PI / lambda;
			const double s = std::sin(v[0]);
			const double s2 = std::sin(2 * v[0]);
			const double c2 = std::cos(2 * v[0]);
			out.e = c * (d[0] * d[0] + s * s * d[1] * d[1]);
			out.g(0) = c * s2 * d[1] * d[1];
			out.g(2) = 2 * c * d[0];
			out.g(3) = 2 * c * s * s * d[1];
			out.h(0, 0) = 2 * c * c2 * d[1] * d[1];
			out.h(0, 3) = out.h(3, 0) = 2 * c * s2 * d[1];
			out.h(2, 2) = 2 * c;
			out.h(3, 3) = 2 * c * s * s;
		}

		// Linear part of each component along the domain circle (winding of the map).
		Vector winding(const Problem &problem)
		{
			switch (problem.kind)
			{
			case InstanceKind::HarmonicTorus:
				return Eigen::Vector2d(problem.p / (2 * M_PI), problem.q / (2 * M_PI));
			case InstanceKind::HarmonicSphere:
				return Eigen::Vector2d(0.0, 1.0);
			default:
				return Vector::Zero(1);
			}
		}

		// Periodic part of component a at the nodes.
		Vector periodic_part(const Problem &problem, const ProblemState &state, int a)
		{
			const int N = problem.grid.size();
			return state.values.segment(a * N, N) - winding(problem)(a) * problem.grid.nodes;
		}

		struct QuadFields
		{
			std::vector<Vector> v, d;
		};

		QuadFields quad_fields(const Problem &problem, const ProblemState &state)
		{
			const int c = problem.components();
			const Vector m = winding(problem);
			QuadFields f;
			for (int a = 0; a < c; ++a)
			{
				const Vector u = periodic_part(problem, state, a);
				f.v.push_back(problem.ops.P * u + m(a) * problem.ops.points);
				f.d.push_back((problem.ops.Pd * u).array() + m(a));
			}
			return f;
		}

		Local local_density(const Problem &problem, double lambda_hat, const QuadFields &f, int q)
		{
			Local out;
			switch (problem.kind)
			{
			case InstanceKind::CmcCircle:
				circle_density(lambda_hat, problem.H, f.v[0](q), f.d[0](q), out);
				break;
			case InstanceKind::CmcProfile:
				profile_density(lambda_hat, problem.H, f.v[0](q), f.d[0](q), out);
				break;
			case InstanceKind::HarmonicTorus:
			{
				const double d[2] = {f.d[0](q), f.d[1](q)};
				torus_density(problem.ambient(lambda_hat).Q, d, out);
				break;
			}
			case InstanceKind::HarmonicSphere:
			{
				const double v[2] = {f.v[0](q), f.v[1](q)};
				const double d[2] = {f.d[0](q), f.d[1](q)};
				sphere_density(lambda_hat, v, d, out);
				break;
			}
			}
			return out;
		}

		struct Assembled
		{
			double value = 0;
			Vector gradient;
			Matrix hessian;
		};

		// Value, nodal gradient and nodal Hessian of sum_q w_q e(v_q, d_q), over all nodes.
		Assembled assemble(const Problem &problem, const ProblemState &state, double lambda_hat, int order)
		{
			check_state(problem, state, lambda_hat);
			const int c = problem.components();
			const int N = problem.grid.size();
			const auto &ops = problem.ops;
			const int M = static_cast<int>(ops.w.size());
			const QuadFields f = quad_fields(problem, state);

			std::vector<Local> locals(M);
			Assembled out;
			for (int q = 0; q < M; ++q)
			{
				locals[q] = local_density(problem, lambda_hat, f, q);
				out.value += ops.w(q) * locals[q].e;
			}
			if (order < 1)
				return out;

			auto op = [&](int var) -> const Matrix & { return var < c ? ops.P : ops.Pd; };
			auto component = [c](int var) { return var % c; };

			out.gradient = Vector::Zero(c * N);
			for (int var = 0; var < 2 * c; ++var)
			{
				Vector coeff(M);
				for (int q = 0; q < M; ++q)
					coeff(q) = ops.w(q) * locals[q].g(var);
				out.gradient.segment(component(var) * N, N) += op(var).transpose() * coeff;
			}
			if (order < 2)
				return out;

			out.hessian = Matrix::Zero(c * N, c * N);
			for (int i = 0; i < 2 * c; ++i)
				for (int j = i; j < 2 * c; ++j)
				{
					Vector coeff(M);
					for (int q = 0; q < M; ++q)
						coeff(q) = ops.w(q) * locals[q].h(i, j);
					if (coeff.cwiseAbs().maxCoeff() == 0.0)
						continue;
					const Matrix block = op(i).transpose() * coeff.asDiagonal() * op(j);
					out.hessian.block(component(i) * N, component(j) * N, N, N) += block;
					if (i != j)
						out.hessian.block(component(j) * N, component(i) * N, N, N) += block.transpose();
				}
			return out;
		}

		// Indices of the unknowns inside the nodal vector.
		std::pair<int, int> dof_range(const Problem &problem)
		{
			const int N = problem.grid.size();
			if (problem.kind == InstanceKind::CmcProfile)
				return {1, N - 2};
			return {0, problem.components() * N};
		}

		bool periodic_instance(InstanceKind kind) { return kind != InstanceKind::CmcProfile; }

		void require_grid(const Problem &problem)
		{
			const bool periodic = problem.grid.kind == GridKind::Periodic;
			if (periodic != periodic_instance(problem.kind))
				throw PreconditionError("Problem: " + problem.name() + " needs a " +
				                        (periodic ? "Dirichlet" : "periodic") + " grid");
			if (periodic && problem.grid.order != DiffOrder::Spectral)
				throw UnsupportedError("Problem: " + problem.name() + " is discretized on spectral grids only");
		}

		Eigen::Matrix3d cross_matrix(const Eigen::Vector3d &a)
		{
			Eigen::Matrix3d m;
			m << 0, -a(2), a(1), a(2), 0, -a(0), -a(1), a(0), 0;
			return m;
		}

		double wrap_angle(double x) { return std::remainder(x, 2 * M_PI); }
	} // namespace

	Problem Problem::cmc_circle(double H, const Grid &grid)
	{
		Problem p;
		p.kind = InstanceKind::CmcCircle;
		p.grid = grid;
		p.H = H;
		require_grid(p);
		p.ops = quadrature_operators(grid);
		return p;
	}

	Problem Problem::cmc_profile(double H, const Grid &grid, double radius_lo, double radius_hi)
	{
		Problem p;
		p.kind = InstanceKind::CmcProfile;
		p.grid = grid;
		p.H = H;
		p.radius_lo = radius_lo;
		p.radius_hi = radius_hi;
		require_grid(p);
		if (!(radius_lo > 0) || !(radius_hi > 0))
			throw DomainError("cmc_profile: boundary radii must be positive");
		p.ops = quadrature_operators(grid);
		return p;
	}

	Problem Problem::harmonic_torus(int pw, int qw, const Grid &grid, const Matrix &Q0, const Matrix &Q1)
	{
		Problem p;
		p.kind = InstanceKind::HarmonicTorus;
		p.grid = grid;
		p.p = pw;
		p.q = qw;
		p.Q0 = Q0;
		p.Q1 = Q1;
		require_grid(p);
		AmbientModel::flat_torus(Q0);
		AmbientModel::flat_torus(Q1);
		p.ops = quadrature_operators(grid);
		return p;
	}

	Problem Problem::harmonic_sphere(const Grid &grid)
	{
		Problem p;
		p.kind = InstanceKind::HarmonicSphere;
		p.grid = grid;
		require_grid(p);
		p.ops = quadrature_operators(grid);
		return p;
	}

	AmbientModel Problem::ambient(double lambda_hat) const
	{
		switch (kind)
		{
		case InstanceKind::CmcCircle:
			return AmbientModel::space_form(lambda_hat);
		case InstanceKind::CmcProfile:
			return AmbientModel::product(lambda_hat);
		case InstanceKind::HarmonicTorus:
			return AmbientModel::flat_torus((1 - lambda_hat) * Q0 + lambda_hat * Q1);
		case InstanceKind::HarmonicSphere:
			return AmbientModel::scaled_sphere(lambda_hat);
		}
		throw UnsupportedError("Problem::ambient: unknown instance");
	}

	std::string Problem::name() const
	{
		switch (kind)
		{
		case InstanceKind::CmcCircle:
			return "CmcCircle";
		case InstanceKind::CmcProfile:
			return "CmcProfile";
		case InstanceKind::HarmonicTorus:
			return "HarmonicTorus";
		case InstanceKind::HarmonicSphere:
			return "HarmonicSphere";
		}
		return "unknown";
	}

	int Problem::components() const
	{
		return (kind == InstanceKind::HarmonicTorus || kind == InstanceKind::HarmonicSphere) ? 2 : 1;
	}

	int Problem::dof_count() const { return dof_range(*this).second; }

	int Problem::motion_dim() const
	{
		switch (kind)
		{
		case InstanceKind::CmcCircle:
			return 3;
		case InstanceKind::CmcProfile:
			return 0;
		case InstanceKind::HarmonicTorus:
			return 3;
		case InstanceKind::HarmonicSphere:
			return 4;
		}
		return 0;
	}

	Vector state_dofs(const Problem &problem, const ProblemState &state)
	{
		const auto [start, count] = dof_range(problem);
		if (state.values.size() != problem.components() * problem.grid.size())
			throw ShapeError("state_dofs: state has wrong size");
		return state.values.segment(start, count);
	}

	ProblemState state_from_dofs(const Problem &problem, const Vector &dofs)
	{
		const auto [start, count] = dof_range(problem);
		if (dofs.size() != count)
			throw ShapeError("state_from_dofs: wrong number of unknowns");
		ProblemState s;
		s.values.resize(problem.components() * problem.grid.size());
		s.values.segment(start, count) = dofs;
		if (problem.kind == InstanceKind::CmcProfile)
		{
			s.values(0) = problem.radius_lo;
			s.values(s.values.size() - 1) = problem.radius_hi;
		}
		return s;
	}

	Pairing dof_pairing(const Problem &problem)
	{
		const auto [start, count] = dof_range(problem);
		const int N = problem.grid.size();
		Vector w(problem.components() * N);
		for (int a = 0; a < problem.components(); ++a)
			w.segment(a * N, N) = problem.grid.quad;
		return {w.segment(start, count)};
	}

	void check_state(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		const int N = problem.grid.size();
		if (state.values.size() != problem.components() * N)
			throw ShapeError("state has " + std::to_string(state.values.size()) + " values, expected " +
			                 std::to_string(problem.components() * N));
		if (!state.values.allFinite())
			throw DomainError("state has non-finite values");
		switch (problem.kind)
		{
		case InstanceKind::CmcCircle:
		case InstanceKind::CmcProfile:
		{
			const double hi = polar_radius_limit(lambda_hat);
			if (state.values.minCoeff() < polar_radius_floor || state.values.maxCoeff() > hi)
				throw DomainError("radius leaves the polar chart domain [" + std::to_string(polar_radius_floor) + ", " +
				                  std::to_string(hi) + "]");
			if (problem.kind == InstanceKind::CmcProfile &&
			    (state.values(0) != problem.radius_lo || state.values(N - 1) != problem.radius_hi))
				throw DomainError("profile state does not match the prescribed boundary radii");
			break;
		}
		case InstanceKind::HarmonicSphere:
		{
			const Vector theta = state.values.head(N);
			if (theta.minCoeff() <= polar_radius_floor || theta.maxCoeff() >= M_PI - polar_radius_floor)
				throw DomainError("sphere map leaves the chart away from the poles");
			break;
		}
		case InstanceKind::HarmonicTorus:
			break;
		}
	}

	double value(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		return assemble(problem, state, lambda_hat, 0).value;
	}

	Vector residual(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		const auto [start, count] = dof_range(problem);
		const Assembled a = assemble(problem, state, lambda_hat, 1);
		return a.gradient.segment(start, count).cwiseQuotient(dof_pairing(problem).weights);
	}

	JacobiOperator jacobi(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		const auto [start, count] = dof_range(problem);
		const Assembled a = assemble(problem, state, lambda_hat, 2);
		JacobiOperator J;
		J.pairing = dof_pairing(problem);
		J.lambda_hat = lambda_hat;
		J.matrix = J.pairing.weights.cwiseInverse().asDiagonal() * a.hessian.block(start, start, count, count);
		return J;
	}

	Matrix killing_jacobi_basis(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		check_state(problem, state, lambda_hat);
		const int N = problem.grid.size();
		const auto &nodes = problem.grid.nodes;
		const AmbientModel model = problem.ambient(lambda_hat);
		const auto fields = killing_fields(model);
		Matrix K(problem.dof_count(), problem.motion_dim());
		switch (problem.kind)
		{
		case InstanceKind::CmcCircle:
		{
			const Vector rp = problem.grid.diff1 * state.values;
			for (int i = 0; i < 3; ++i)
				for (int j = 0; j < N; ++j)
				{
					const Vector Kj = fields[i].eval(Eigen::Vector2d(state.values(j), nodes(j)));
					K(j, i) = Kj(0) - rp(j) * Kj(1);
				}
			break;
		}
		case InstanceKind::CmcProfile:
			break;
		case InstanceKind::HarmonicTorus:
		case InstanceKind::HarmonicSphere:
		{
			const int n_fields = static_cast<int>(fields.size());
			for (int i = 0; i < n_fields; ++i)
				for (int j = 0; j < N; ++j)
				{
					const Vector Kj = fields[i].eval(Eigen::Vector2d(state.values(j), state.values(N + j)));
					K(j, i) = Kj(0);
					K(N + j, i) = Kj(1);
				}
			const Vector m = winding(problem);
			for (int a = 0; a < 2; ++a)
				K.block(a * N, n_fields, N, 1) =
				    -((problem.grid.diff1 * periodic_part(problem, state, a)).array() + m(a));
			break;
		}
		}
		return K;
	}

	Vector geodesic_curvature(const Problem &problem, const ProblemState &state, double lambda_hat)
	{
		if (problem.kind != InstanceKind::CmcCircle)
			throw UnsupportedError("geodesic_curvature: CmcCircle only");
		check_state(problem, state, lambda_hat);
		const Vector &r = state.values;
		const Vector rp = problem.grid.diff1 * r;
		const Vector rpp = problem.grid.diff2 * r;
		Vector kappa(r.size());
		for (int j = 0; j < r.size(); ++j)
		{
			const auto [sn, cs] = sn_lambda(lambda_hat, r(j));
			const double S = std::sqrt(rp(j) * rp(j) + sn * sn);
			kappa(j) = (cs * (sn * sn + 2 * rp(j) * rp(j)) - sn * rpp(j)) / (S * S * S);
		}
		return kappa;
	}

	namespace
	{
		ProblemState move_circle(const Problem &problem, const ProblemState &state, double lambda,
		                         const Vector &coeffs)
		{
			const auto basis = algebra_basis(lambda, 2).matrices();
			Matrix X = Matrix::Zero(3, 3);
			for (int i = 0; i < 3; ++i)
				X += coeffs(i) * basis[i];
			const Eigen::Matrix3d g = expm<double>(X);
			const TrigInterpolant r(problem.grid, state.values);

			auto moved = [&](double sigma, Eigen::Vector3d &y, double &alpha, double &dalpha) {
				const double rv = r(sigma), rp = r.derivative(sigma);
				const auto [sn, cs] = sn_lambda(lambda, rv);
				const Eigen::Vector3d dr(-lambda * sn, cs * std::cos(sigma), cs * std::sin(sigma));
				const Eigen::Vector3d dtheta(0.0, -sn * std::sin(sigma), sn * std::cos(sigma));
				y = g * polar_to_quadric(lambda, rv, sigma);
				const Eigen::Vector3d dy = g * (rp * dr + dtheta);
				alpha = std::atan2(y(2), y(1));
				dalpha = (y(1) * dy(2) - y(2) * dy(1)) / (y(1) * y(1) + y(2) * y(2));
			};

			ProblemState out{Vector(state.values.size())};
			for (int j = 0; j < problem.grid.size(); ++j)
			{
				const double target = problem.grid.nodes(j);
				Eigen::Vector3d y;
				double alpha, dalpha;
				moved(target, y, alpha, dalpha);
				double sigma = target - wrap_angle(alpha - target);
				bool converged = false;
				for (int it = 0; it < 60; ++it)
				{
					moved(sigma, y, alpha, dalpha);
					const double diff = wrap_angle(alpha - target);
					if (!(dalpha > 0))
						throw DomainError("apply_motion: moved curve is no longer a radial graph");
					if (std::abs(diff) < 1e-15)
					{
						converged = true;
						break;
					}
					sigma -= diff / dalpha;
				}
				if (!converged)
				{
					moved(sigma, y, alpha, dalpha);
					if (std::abs(wrap_angle(alpha - target)) > 1e-13)
						throw NoConvergence("apply_motion: angle inversion failed");
				}
				out.values(j) = quadric_to_polar(lambda, y)(0);
			}
			check_state(problem, out, lambda);
			return out;
		}

		// phi(s) -> phi(s - tau) on every component, keeping the winding.
		ProblemState rotate_domain(const Problem &problem, const ProblemState &state, double tau)
		{
			if (tau == 0.0)
				return state;
			const int N = problem.grid.size();
			const Vector m = winding(problem);
			ProblemState out{state.values};
			for (int a = 0; a < problem.components(); ++a)
			{
				const TrigInterpolant u(problem.grid, periodic_part(problem, state, a));
				for (int j = 0; j < N; ++j)
				{
					const double s = problem.grid.nodes(j) - tau;
					out.values(a * N + j) = u(s) + m(a) * s;
				}
			}
			return out;
		}
	} // namespace

	ProblemState apply_motion(const Problem &problem, const ProblemState &state, double lambda_hat,
	                          const Vector &coeffs)
	{
		if (coeffs.size() != problem.motion_dim())
			throw ShapeError("apply_motion: expected " + std::to_string(problem.motion_dim()) + " coefficients");
		check_state(problem, state, lambda_hat);
		const int N = problem.grid.size();
		switch (problem.kind)
		{
		case InstanceKind::CmcCircle:
			return move_circle(problem, state, lambda_hat, coeffs);
		case InstanceKind::CmcProfile:
			return state;
		case InstanceKind::HarmonicTorus:
		{
			ProblemState out{state.values};
			out.values.head(N).array() += coeffs(0);
			out.values.tail(N).array() += coeffs(1);
			return rotate_domain(problem, out, coeffs(2));
		}
		case InstanceKind::HarmonicSphere:
		{
			Eigen::Matrix3d X = Eigen::Matrix3d::Zero();
			for (int i = 0; i < 3; ++i)
				X += coeffs(i) * cross_matrix(Eigen::Vector3d::Unit(i));
			const Eigen::Matrix3d R = expm<double>(Matrix(X));
			ProblemState out{state.values};
			for (int j = 0; j < N; ++j)
			{
				const double th = state.values(j), ph = state.values(N + j);
				const Eigen::Vector3d p(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
				const Eigen::Vector3d y = R * p;
				out.values(j) = std::atan2(y.head<2>().norm(), y(2));
				const double az = std::atan2(y(1), y(0));
				out.values(N + j) = az + 2 * M_PI * std::round((ph - az) / (2 * M_PI));
			}
			out = rotate_domain(problem, out, coeffs(3));
			check_state(problem, out, lambda_hat);
			return out;
		}
		}
		return state;
	}

	std::map<std::string, double> derived_scalars(const Problem &problem, const ProblemState &state,
	                                              double lambda_hat)
	{
		check_state(problem, state, lambda_hat);
		const auto &ops = problem.ops;
		const QuadFields f = quad_fields(problem, state);
		const int M = static_cast<int>(ops.w.size());
		std::map<std::string, double> out;
		switch (problem.kind)
		{
		case InstanceKind::CmcCircle:
		{
			double length = 0, area = 0;
			for (int q = 0; q < M; ++q)
			{
				const double sn = sn_lambda(lambda_hat, f.v[0](q)).value;
				length += ops.w(q) * std::sqrt(f.d[0](q) * f.d[0](q) + sn * sn);
				area += ops.w(q) * sn_area_primitive(lambda_hat, f.v[0](q));
			}
			out["length"] = length;
			out["area"] = area;
			out["best_fit_radius"] = 2 * sn_inverse(lambda_hat, std::sqrt(area / (4 * M_PI)));
			break;
		}
		case InstanceKind::CmcProfile:
		{
			double volume = 0;
			for (int q = 0; q < M; ++q)
				volume += ops.w(q) * 2 * M_PI * sn_area_primitive(lambda_hat, f.v[0](q));
			const Vector res = residual(problem, state, lambda_hat);
			double deviation = 0;
			for (int j = 0; j < res.size(); ++j)
				deviation = std::max(
				    deviation, std::abs(res(j)) / (2 * M_PI * sn_lambda(lambda_hat, state.values(j + 1)).value));
			out["volume"] = volume;
			out["min_radius"] = state.values.minCoeff();
			out["max_curvature_deviation"] = deviation;
			break;
		}
		case InstanceKind::HarmonicTorus:
		{
			const Eigen::Matrix2d Q = problem.ambient(lambda_hat).Q;
			double length = 0;
			for (int q = 0; q < M; ++q)
			{
				const Eigen::Vector2d d(f.d[0](q), f.d[1](q));
				length += ops.w(q) * std::sqrt(d.dot(Q * d));
			}
			out["length"] = length;
			out["energy"] = value(problem, state, lambda_hat);
			break;
		}
		case InstanceKind::HarmonicSphere:
		{
			double length = 0;
			for (int q = 0; q < M; ++q)
			{
				const double s = std::sin(f.v[0](q));
				length += ops.w(q) * std::sqrt((f.d[0](q) * f.d[0](q) + s * s * f.d[1](q) * f.d[1](q)) / lambda_hat);
			}
			out["length"] = length;
			out["length_sqrt_lambda"] = length * std::sqrt(lambda_hat);
			out["energy"] = value(problem, state, lambda_hat);
			break;
		}
		}
		return out;
	}

	double geodesic_circle_radius(double lambda, double H)
	{
		if (!(H > 0))
			throw DomainError("geodesic_circle_radius: H must be positive");
		if (lambda == 0)
			return 1 / H;
		if (lambda > 0)
		{
			const double q = std::sqrt(lambda);
			return std::atan(q / H) / q;
		}
		const double q = std::sqrt(-lambda);
		if (!(q < H))
			throw DomainError("geodesic_circle_radius: no closed circle of curvature H when lambda <= -H^2");
		return std::atanh(q / H) / q;
	}

	ProblemState analytic_seed(const Problem &problem, double lambda_hat)
	{
		const int N = problem.grid.size();
		const Vector &s = problem.grid.nodes;
		ProblemState state;
		switch (problem.kind)
		{
		case InstanceKind::CmcCircle:
			state.values = Vector::Constant(N, geodesic_circle_radius(lambda_hat, problem.H));
			break;
		case InstanceKind::CmcProfile:
			state.values = problem.radius_lo + (problem.radius_hi - problem.radius_lo) *
			                                       (s.array() - problem.grid.a) / problem.grid.length();
			state.values(0) = problem.radius_lo;
			state.values(N - 1) = problem.radius_hi;
			break;
		case InstanceKind::HarmonicTorus:
			state.values.resize(2 * N);
			state.values << problem.p / (2 * M_PI) * s, problem.q / (2 * M_PI) * s;
			break;
		case InstanceKind::HarmonicSphere:
			state.values.resize(2 * N);
			state.values << Vector::Constant(N, M_PI / 2), s;
			break;
		}
		check_state(problem, state, lambda_hat);
		return state;
	}
} // namespace equideform
