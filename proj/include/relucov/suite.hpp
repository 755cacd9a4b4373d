#pragma once

#include <string>
#include <vector>

#include "relucov/linalg.hpp"
#include "relucov/network.hpp"

namespace relucov {

// An ordered, finite set of inputs.
class TestSuite {
public:
    TestSuite() = default;
    explicit TestSuite(std::vector<Vec> inputs) : inputs_(std::move(inputs)) {}

    static TestSuite load(const std::string& path) { return TestSuite(load_dataset_file(path)); }

    const std::vector<Vec>& inputs() const { return inputs_; }
    std::size_t size() const { return inputs_.size(); }
    bool empty() const { return inputs_.empty(); }
    const Vec& operator[](std::size_t i) const { return inputs_[i]; }

    void add(Vec x) { inputs_.push_back(std::move(x)); }
    // append unless an exactly equal vector is already present
    bool add_unique(const Vec& x);

    std::string to_json() const { return dataset_to_json(inputs_); }

private:
    std::vector<Vec> inputs_;
};

// A suite with one cached trace per input; predicate checks only ever read
// the cached signs and values.
struct TracedSuite {
    const Network* net = nullptr;
    std::vector<Vec> inputs;
    std::vector<ActivationTrace> traces;

    std::size_t size() const { return traces.size(); }
};

TracedSuite trace_suite(const Network& net, const TestSuite& suite);

} // namespace relucov
