#pragma once

#include "mzv/numeric_types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mzv {

/// Working precision and error target shared by every numeric routine.
///
/// MPFR precision in this library is process-wide. Call activate() once
/// before starting worker threads; numeric routines call ensure_active(),
/// which only writes the global when the requested precision differs.
struct PrecisionContext {
    unsigned working_digits = 40;
    double target_tol = 1e-10;
    std::uint64_t max_n = std::uint64_t{1} << 24;

    void validate() const
    {
        if (working_digits < 20) throw std::invalid_argument("working_digits must be >= 20");
        if (!(target_tol > 0.0)) throw std::invalid_argument("target_tol must be positive");
        // ten guard digits are reserved below the tolerance
        double floor_tol = std::pow(10.0, -static_cast<double>(working_digits) + 10.0);
        if (target_tol < floor_tol * (1.0 - 1e-12))
            throw std::invalid_argument("target_tol below 10^-(working_digits-10)");
        if (max_n < 16) throw std::invalid_argument("max_n must be >= 16");
    }

    void activate() const
    {
        validate();
        Float::default_precision(working_digits);
    }

    void ensure_active() const
    {
        if (Float::default_precision() != working_digits) activate();
    }

    Float tol() const { return Float(target_tol); }

    /// Truncation order for asymptotic tail expansions at this precision.
    int expansion_order() const { return std::min<int>(static_cast<int>(working_digits) + 24, 240); }

    /// Cut-off below which explicit head sums are used before switching to
    /// asymptotic tails.
    std::uint64_t head_terms() const { return static_cast<std::uint64_t>(expansion_order()) + 8; }
};

/// Machine epsilon at the active precision.
inline Float unit_roundoff() { return std::numeric_limits<Float>::epsilon(); }

/// A value with a conservative absolute error bound.
///
/// Arithmetic adds bounds for +/- and uses |a|eb + |b|ea + ea*eb for *;
/// every operation also charges one rounding unit of the result.
class Real {
  public:
    Real() : value_(0), err_(0) {}
    Real(Float value, Float err = Float(0)) : value_(std::move(value)), err_(abs(err)) {}

    static Real exact(const Rational& q)
    {
        Float v = to_float(q);
        return Real(v, abs(v) * unit_roundoff());
    }
    static Real exact(std::int64_t v) { return Real(Float(v), Float(0)); }

    const Float& value() const noexcept { return value_; }
    const Float& err() const noexcept { return err_; }

    Real& widen(const Float& extra)
    {
        err_ += abs(extra);
        return *this;
    }

    Real operator-() const { return Real(-value_, err_); }

    friend Real operator+(const Real& a, const Real& b)
    {
        Float v = a.value_ + b.value_;
        return Real(v, a.err_ + b.err_ + abs(v) * unit_roundoff());
    }
    friend Real operator-(const Real& a, const Real& b)
    {
        Float v = a.value_ - b.value_;
        return Real(v, a.err_ + b.err_ + abs(v) * unit_roundoff());
    }
    friend Real operator*(const Real& a, const Real& b)
    {
        Float v = a.value_ * b.value_;
        Float e = abs(a.value_) * b.err_ + abs(b.value_) * a.err_ + a.err_ * b.err_;
        return Real(v, e + abs(v) * unit_roundoff());
    }
    friend Real operator*(const Rational& q, const Real& a) { return Real::exact(q) * a; }

    Real& operator+=(const Real& o) { return *this = *this + o; }
    Real& operator-=(const Real& o) { return *this = *this - o; }
    Real& operator*=(const Real& o) { return *this = *this * o; }

    bool contains(const Float& x) const { return abs(x - value_) <= err_; }

    friend std::ostream& operator<<(std::ostream& os, const Real& r)
    {
        return os << to_decimal(r.value_, 30) << " +/- " << to_scientific(r.err_, 2);
    }

  private:
    Float value_;
    Float err_;
};

inline Real ipow(const Real& base, unsigned n)
{
    Real out = Real::exact(1);
    for (unsigned i = 0; i < n; ++i) out *= base;
    return out;
}

}  // namespace mzv
