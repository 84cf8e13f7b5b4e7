// extended_real.hpp — the real line extended with signed infinities.
// Stochastic efficiency takes values in R ∪ {+inf, -inf}; distributions over
// it need an explicit tag rather than IEEE infinities so that serialization
// and atom matching stay unambiguous.

#pragma once

#include <cmath>
#include <string>

#include "qotto/errors.hpp"

namespace qotto {

class ExtendedReal {
public:
    static ExtendedReal finite(double v) {
        if (!std::isfinite(v)) {
            throw InvalidInput("ExtendedReal::finite: value is not finite");
        }
        return ExtendedReal(Tag::Finite, v);
    }
    static ExtendedReal plus_inf() { return ExtendedReal(Tag::PlusInf, 0.0); }
    static ExtendedReal minus_inf() { return ExtendedReal(Tag::MinusInf, 0.0); }

    bool is_finite() const { return tag_ == Tag::Finite; }
    bool is_plus_inf() const { return tag_ == Tag::PlusInf; }
    bool is_minus_inf() const { return tag_ == Tag::MinusInf; }
    bool is_infinite() const { return tag_ != Tag::Finite; }

    // Finite payload; calling this on an infinity is a logic error.
    double value() const {
        if (!is_finite()) {
            throw UndefinedResult("ExtendedReal::value: not a finite value");
        }
        return value_;
    }

    std::string str() const {
        if (is_plus_inf()) return "+inf";
        if (is_minus_inf()) return "-inf";
        return std::to_string(value_);
    }

    // Total order: -inf < any finite < +inf; finite values by magnitude.
    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        return a.rank() != b.rank() ? a.rank() < b.rank()
                                    : (a.is_finite() && a.value_ < b.value_);
    }
    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.tag_ == b.tag_ && (!a.is_finite() || a.value_ == b.value_);
    }
    friend bool operator!=(const ExtendedReal& a, const ExtendedReal& b) {
        return !(a == b);
    }

private:
    enum class Tag { MinusInf, Finite, PlusInf };

    ExtendedReal(Tag tag, double v) : tag_(tag), value_(v) {}

    int rank() const {
        switch (tag_) {
            case Tag::MinusInf: return -1;
            case Tag::Finite: return 0;
            default: return 1;
        }
    }

    Tag tag_;
    double value_;
};

} // namespace qotto
