#pragma once

// Measured constants frozen as regression bounds.

namespace shapehit::recorded {

/// Fractional hash families: every admissible z is balanced by a fraction
/// >= 1 / (kFracK * 2^{kFracKappa * t}) of the members.
inline constexpr double kFracK = 2.0;
inline constexpr double kFracKappa = 1.0;

/// Strong rectangles: Pr_S[accept] >= p / 2^{kRectKappa * rho}.
inline constexpr double kRectKappa = 0.1;

}  // namespace shapehit::recorded
