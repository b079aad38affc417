#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace equideform
{
	using Vector = Eigen::VectorXd;
	using Matrix = Eigen::MatrixXd;

	template <typename Scalar>
	using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
	template <typename Scalar>
	using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

	// Argument outside the domain of a geometric quantity (r <= 0, lambda = 0 for eta, ...).
	class DomainError : public std::domain_error
	{
	public:
		using std::domain_error::domain_error;
	};

	class ShapeError : public std::invalid_argument
	{
	public:
		using std::invalid_argument::invalid_argument;
	};

	class UnsupportedError : public std::logic_error
	{
	public:
		using std::logic_error::logic_error;
	};

	class PreconditionError : public std::logic_error
	{
	public:
		using std::logic_error::logic_error;
	};

	class NoConvergence : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	// Bordered Newton matrix too close to singular: the solution lost nondegeneracy.
	class IllConditioned : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};
} // namespace equideform
