#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "mfh/errors.hpp"

namespace mfh {

// The five moral foundations, in fixed iteration order.
enum class Foundation {
    CareHarm = 0,
    FairnessCheating = 1,
    LoyaltyBetrayal = 2,
    AuthoritySubversion = 3,
    SanctityDegradation = 4,
};

inline constexpr std::size_t kFoundationCount = 5;

inline constexpr std::array<Foundation, kFoundationCount> all_foundations() {
    return {Foundation::CareHarm, Foundation::FairnessCheating, Foundation::LoyaltyBetrayal,
            Foundation::AuthoritySubversion, Foundation::SanctityDegradation};
}

inline constexpr std::size_t index_of(Foundation f) {
    return static_cast<std::size_t>(f);
}

inline std::string_view to_string(Foundation f) {
    switch (f) {
        case Foundation::CareHarm: return "care_harm";
        case Foundation::FairnessCheating: return "fairness_cheating";
        case Foundation::LoyaltyBetrayal: return "loyalty_betrayal";
        case Foundation::AuthoritySubversion: return "authority_subversion";
        case Foundation::SanctityDegradation: return "sanctity_degradation";
    }
    return "?";
}

inline std::optional<Foundation> parse_foundation(std::string_view s) {
    for (Foundation f : all_foundations()) {
        if (s == to_string(f)) return f;
    }
    return std::nullopt;
}

inline Foundation foundation_from_string(std::string_view s) {
    if (auto f = parse_foundation(s)) return *f;
    throw ValidationError("unknown foundation name: " + std::string(s));
}

// Individualizing: Care/Harm, Fairness/Cheating. Binding: the other three.
inline constexpr bool is_individualizing(Foundation f) {
    return f == Foundation::CareHarm || f == Foundation::FairnessCheating;
}

inline constexpr bool is_binding(Foundation f) {
    return !is_individualizing(f);
}

// Sign of the effect direction predicted by the Moral Foundations Hypothesis
// for the ordered identity pair (liberal, conservative): +1 for the
// individualizing foundations, -1 for the binding foundations.
inline constexpr double mfh_sign(Foundation f) {
    return is_individualizing(f) ? +1.0 : -1.0;
}

// One real value per foundation, indexed by Foundation.
using FoundationVec = std::array<double, kFoundationCount>;

inline constexpr FoundationVec zero_vec() {
    return {0.0, 0.0, 0.0, 0.0, 0.0};
}

inline double vec_sum(const FoundationVec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace mfh
