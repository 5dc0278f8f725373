#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mzv {

/// Exact arbitrary-size rational (GMP).
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Variable-precision binary float (MPFR). Precision is process-wide and is
/// selected through PrecisionContext::activate().
using Float = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                            boost::multiprecision::et_off>;

inline Float to_float(const Rational& q)
{
    return Float(boost::multiprecision::numerator(q)) / Float(boost::multiprecision::denominator(q));
}

inline Float to_float(std::int64_t v) { return Float(v); }

/// k^{-e} with the (-1)^k factor when sign < 0.
template <class T>
T signed_power_term(int sign, int exponent, std::uint64_t k)
{
    T denom = 1;
    T base = T(k);
    for (int i = 0; i < exponent; ++i) denom *= base;
    T v = T(1) / denom;
    if (sign < 0 && (k & 1U)) v = -v;
    return v;
}

template <>
inline Rational signed_power_term<Rational>(int sign, int exponent, std::uint64_t k)
{
    BigInt d = boost::multiprecision::pow(BigInt(k), static_cast<unsigned>(exponent));
    Rational v(BigInt(1), d);
    if (sign < 0 && (k & 1U)) v = -v;
    return v;
}

class DivergentSeries : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ToleranceNotMet : public std::runtime_error {
  public:
    ToleranceNotMet(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved)
    {
    }
    double achieved() const noexcept { return achieved_; }

  private:
    double achieved_;
};

std::string to_decimal(const Float& v, int digits);
std::string to_scientific(const Float& v, int digits = 3);

inline std::string to_decimal(const Float& v, int digits)
{
    return v.str(digits, std::ios_base::fmtflags(0));
}

inline std::string to_scientific(const Float& v, int digits)
{
    return v.str(digits, std::ios_base::scientific);
}

}  // namespace mzv
