#pragma once

#include <stdexcept>
#include <string>

namespace metriclab {

// Base class for all library errors. CLI maps these to exit code 1
// (usage / specification problems) unless noted otherwise.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A domain specification is malformed or describes an invalid set
// (empty interior, removed set not strictly inside the base, ...).
class InvalidSpec : public Error {
public:
    using Error::Error;
};

// Points/regions with inconsistent dimensions, or a dimension outside
// what the operation supports.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A metric was queried at a point not inside the open set.
class PointOutsideDomain : public Error {
public:
    using Error::Error;
};

// k_radial_ball requires x, y and the origin to be collinear with the
// origin between them or both points on one radius.
class NotRadialConfiguration : public Error {
public:
    using Error::Error;
};

// k_segment_to_boundary requires both points on the segment from the
// base point to one of its nearest boundary points.
class NotOnNearestBoundarySegment : public Error {
public:
    using Error::Error;
};

// Inversion center coincides with the evaluation point.
class CenterSingularity : public Error {
public:
    using Error::Error;
};

// Scalar argument outside the range where a formula is defined.
class OutOfRange : public Error {
public:
    using Error::Error;
};

// Rejection sampling acceptance rate fell below the documented floor.
class SamplingExhausted : public Error {
public:
    using Error::Error;
};

// segment_k_length was asked to integrate along a segment that leaves
// the domain (or cannot be certified to stay inside).
class SegmentExitsDomain : public Error {
public:
    using Error::Error;
};

// A path/sequence index is out of range.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// envelope_vs_theorem received a profile on one axis and a prediction
// for the other.
class AxisMismatch : public Error {
public:
    using Error::Error;
};

// check_bound drew zero hypothesis-satisfying samples.
class NoHypothesisHits : public Error {
public:
    using Error::Error;
};

// File could not be read or written.
class IoFailure : public Error {
public:
    using Error::Error;
};

} // namespace metriclab
