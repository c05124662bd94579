#pragma once

#include <stdexcept>
#include <string>

namespace qcarpet {

// Precondition violations on physical inputs (positions outside the box,
// truncated signals, negative times, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised by the flow evaluator when the local density falls below the
// floor; the integrator treats it as a request to shrink the step.
class NodeProximity : public std::runtime_error {
public:
    NodeProximity(double x, double t, double density);

    double x() const noexcept { return x_; }
    double t() const noexcept { return t_; }
    double density() const noexcept { return density_; }

private:
    double x_;
    double t_;
    double density_;
};

} // namespace qcarpet
