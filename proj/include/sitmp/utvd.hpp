#pragma once

#include "sitmp/environment.hpp"
#include "sitmp/timed_path.hpp"

namespace sitmp {

inline constexpr int kDefaultEquivSamples = 30;

/// Uniform temporal visibility deformation test.
///
/// Both paths are mapped onto a common parameter s in [0, 1] by their own
/// absolute time spans (the affine map t_b = alpha * t_a + theta fixed by the
/// endpoints). At each of `samples` uniformly spaced s, the straight segment
/// joining a(t_a) and b(t_b) must be statically free and free of every moving
/// obstacle throughout the closed window between t_a and t_b.
///
/// Throws std::invalid_argument when the endpoints differ, a path has zero
/// duration, or samples < 2.
bool checkEquiv(const TimedPath& a, const TimedPath& b, const Environment& env,
                int samples = kDefaultEquivSamples);

}  // namespace sitmp
