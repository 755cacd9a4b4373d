#include "relucov/suite.hpp"

#include <algorithm>

namespace relucov {

bool TestSuite::add_unique(const Vec& x) {
    if (std::find(inputs_.begin(), inputs_.end(), x) != inputs_.end()) return false;
    inputs_.push_back(x);
    return true;
}

TracedSuite trace_suite(const Network& net, const TestSuite& suite) {
    TracedSuite out;
    out.net = &net;
    out.inputs = suite.inputs();
    out.traces.reserve(suite.size());
    for (const Vec& x : suite.inputs()) out.traces.push_back(evaluate(net, x));
    return out;
}

} // namespace relucov
