#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace halfline {

using cplx = std::complex<double>;

/// Uniform grid on [0, L] with N interior nodes and both Dirichlet endpoints.
/// x_j = j h for j = 0..N+1, h = L/(N+1).
class Grid {
public:
    Grid(double L, int N);

    double length() const noexcept { return L_; }
    int interior() const noexcept { return N_; }
    int size() const noexcept { return N_ + 2; }
    double spacing() const noexcept { return h_; }
    double x(int j) const noexcept { return j * h_; }
    std::vector<double> nodes() const;

    bool operator==(const Grid& other) const noexcept { return L_ == other.L_ && N_ == other.N_; }

private:
    double L_;
    int N_;
    double h_;
};

/// Samples of a function on every node of a grid (boundary nodes included).
template <class T>
class Field {
public:
    using value_type = T;

    explicit Field(const Grid& grid) : grid_(grid), values_(grid.size(), T{}) {}
    Field(const Grid& grid, std::vector<T> values);

    static Field sample(const Grid& grid, const std::function<T(double)>& fn)
    {
        Field out(grid);
        for (int j = 0; j < grid.size(); ++j)
            out.values_[j] = fn(grid.x(j));
        return out;
    }

    const Grid& grid() const noexcept { return grid_; }
    int size() const noexcept { return static_cast<int>(values_.size()); }
    std::span<const T> values() const noexcept { return values_; }
    std::span<T> values() noexcept { return values_; }
    T& operator[](int j) { return values_[j]; }
    const T& operator[](int j) const { return values_[j]; }

    T front() const { return values_.front(); }
    T back() const { return values_.back(); }

    bool all_finite() const noexcept;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(T scale);

private:
    Grid grid_;
    std::vector<T> values_;
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

template <class T>
Field<T> operator+(Field<T> a, const Field<T>& b) { return a += b; }
template <class T>
Field<T> operator-(Field<T> a, const Field<T>& b) { return a -= b; }
template <class T>
Field<T> operator*(T s, Field<T> a) { return a *= s; }

ComplexField to_complex(const RealField& f);
/// Pointwise product of a real weight and a complex field.
ComplexField multiply(const RealField& w, const ComplexField& f);

/// Second-order derivative: centred in the interior, one-sided at both ends.
ComplexField derivative(const ComplexField& f);
RealField derivative(const RealField& f);

/// Trapezoidal rule over [0, L].
double integrate(const RealField& f);
cplx integrate(const ComplexField& f);
double integrate_abs2(const ComplexField& f);

double l2_norm(const ComplexField& f);
double sup_norm(const ComplexField& f);

/// max(max(||f||, ||f'||), ||q f||): the W_{1,2} part is the max of the two
/// L2 norms, used uniformly throughout the library.
double h1_norm(const ComplexField& f, const RealField& q);
/// max(||f'||, ||q f||).
double b_seminorm(const ComplexField& f, const RealField& q);

/// Fraction of the total mass in the rightmost `fraction` of [0, L].
double tail_mass_fraction(const ComplexField& f, double fraction = 0.1);

/// Square root of a nonnegative potential sample-wise (q = sqrt(V1)).
RealField sqrt_field(const RealField& v);

} // namespace halfline
