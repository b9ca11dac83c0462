// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dsd {

#define DSD_DEFINE_ERROR(Name)                                  \
  struct Name : std::runtime_error {                            \
    explicit Name(const std::string& msg)                       \
        : std::runtime_error(std::string(#Name ": ") + msg) {}  \
  }

// molgraph
DSD_DEFINE_ERROR(SyntaxError);
DSD_DEFINE_ERROR(RingClosureError);
DSD_DEFINE_ERROR(ValenceError);
DSD_DEFINE_ERROR(UnsupportedFeature);
DSD_DEFINE_ERROR(AlreadyAugmented);
DSD_DEFINE_ERROR(GenerationFailure);

// diffcore
DSD_DEFINE_ERROR(ShapeMismatch);
DSD_DEFINE_ERROR(IndexOutOfRange);
DSD_DEFINE_ERROR(EmptySegment);
DSD_DEFINE_ERROR(NonScalarLoss);

// training
DSD_DEFINE_ERROR(EmptyBatch);
DSD_DEFINE_ERROR(DegenerateLabels);
DSD_DEFINE_ERROR(Divergence);
DSD_DEFINE_ERROR(FormatError);
DSD_DEFINE_ERROR(VersionMismatch);

// metrics / screening
DSD_DEFINE_ERROR(BadFraction);
DSD_DEFINE_ERROR(TooFewItems);
DSD_DEFINE_ERROR(InsufficientData);
DSD_DEFINE_ERROR(BadInput);

#undef DSD_DEFINE_ERROR

}  // namespace dsd
