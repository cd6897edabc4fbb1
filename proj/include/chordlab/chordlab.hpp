#pragma once

#include "chordlab/alphabets.hpp"
#include "chordlab/analyzer.hpp"
#include "chordlab/chord_syntax.hpp"
#include "chordlab/distances.hpp"
#include "chordlab/evaluation.hpp"
#include "chordlab/learner.hpp"
#include "chordlab/matrix.hpp"
#include "chordlab/serialization.hpp"
#include "chordlab/similarity.hpp"

namespace chordlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chordlab
