#include "halfline/field.hpp"

#include "halfline/error.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

Grid::Grid(double L, int N) : L_(L), N_(N), h_(L / (N + 1))
{
    if (!(L > 0.0) || !std::isfinite(L))
        throw Error(ErrorCode::InvalidArgument, "grid length L must be positive and finite");
    if (N < 8)
        throw Error(ErrorCode::InvalidArgument, "grid needs at least 8 interior nodes");
}

std::vector<double> Grid::nodes() const
{
    std::vector<double> xs(size());
    for (int j = 0; j < size(); ++j)
        xs[j] = x(j);
    xs.back() = L_;
    return xs;
}

template <class T>
Field<T>::Field(const Grid& grid, std::vector<T> values) : grid_(grid), values_(std::move(values))
{
    if (static_cast<int>(values_.size()) != grid.size())
        throw Error(ErrorCode::InvalidArgument, "field length must equal N+2");
}

template <class T>
bool Field<T>::all_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](const T& v) {
        if constexpr (std::is_same_v<T, cplx>)
            return std::isfinite(v.real()) && std::isfinite(v.imag());
        else
            return std::isfinite(v);
    });
}

template <class T>
Field<T>& Field<T>::operator+=(const Field& other)
{
    if (!(grid_ == other.grid_))
        throw Error(ErrorCode::InvalidArgument, "fields live on different grids");
    for (std::size_t j = 0; j < values_.size(); ++j)
        values_[j] += other.values_[j];
    return *this;
}

template <class T>
Field<T>& Field<T>::operator-=(const Field& other)
{
    if (!(grid_ == other.grid_))
        throw Error(ErrorCode::InvalidArgument, "fields live on different grids");
    for (std::size_t j = 0; j < values_.size(); ++j)
        values_[j] -= other.values_[j];
    return *this;
}

template <class T>
Field<T>& Field<T>::operator*=(T scale)
{
    for (auto& v : values_)
        v *= scale;
    return *this;
}

template class Field<cplx>;
template class Field<double>;

ComplexField to_complex(const RealField& f)
{
    ComplexField out(f.grid());
    for (int j = 0; j < f.size(); ++j)
        out[j] = f[j];
    return out;
}

ComplexField multiply(const RealField& w, const ComplexField& f)
{
    ComplexField out(f.grid());
    for (int j = 0; j < f.size(); ++j)
        out[j] = w[j] * f[j];
    return out;
}

namespace {

template <class T>
Field<T> derivative_impl(const Field<T>& f)
{
    const int n = f.size();
    const double h = f.grid().spacing();
    Field<T> out(f.grid());
    for (int j = 1; j < n - 1; ++j)
        out[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

template <class T>
T trapezoid(const Field<T>& f)
{
    const int n = f.size();
    T sum = 0.5 * (f[0] + f[n - 1]);
    for (int j = 1; j < n - 1; ++j)
        sum += f[j];
    return sum * f.grid().spacing();
}

} // namespace

ComplexField derivative(const ComplexField& f) { return derivative_impl(f); }
RealField derivative(const RealField& f) { return derivative_impl(f); }

double integrate(const RealField& f) { return trapezoid(f); }
cplx integrate(const ComplexField& f) { return trapezoid(f); }

double integrate_abs2(const ComplexField& f)
{
    RealField a(f.grid());
    for (int j = 0; j < f.size(); ++j)
        a[j] = std::norm(f[j]);
    return trapezoid(a);
}

double l2_norm(const ComplexField& f) { return std::sqrt(integrate_abs2(f)); }

double sup_norm(const ComplexField& f)
{
    double m = 0.0;
    for (const auto& v : f.values())
        m = std::max(m, std::abs(v));
    return m;
}

double h1_norm(const ComplexField& f, const RealField& q)
{
    const double w12 = std::max(l2_norm(f), l2_norm(derivative(f)));
    return std::max(w12, l2_norm(multiply(q, f)));
}

double b_seminorm(const ComplexField& f, const RealField& q)
{
    return std::max(l2_norm(derivative(f)), l2_norm(multiply(q, f)));
}

double tail_mass_fraction(const ComplexField& f, double fraction)
{
    const double total = integrate_abs2(f);
    if (total == 0.0)
        return 0.0;
    const Grid& g = f.grid();
    const double cut = g.length() * (1.0 - fraction);
    RealField tail(g);
    for (int j = 0; j < f.size(); ++j)
        tail[j] = g.x(j) >= cut ? std::norm(f[j]) : 0.0;
    return integrate(tail) / total;
}

RealField sqrt_field(const RealField& v)
{
    RealField out(v.grid());
    for (int j = 0; j < v.size(); ++j)
        out[j] = std::sqrt(std::max(0.0, v[j]));
    return out;
}

} // namespace halfline
