#include "cdlab/reductions/verify.hpp"

namespace cdl::red {

namespace {

void record(ClassReport& r, Violation v) {
    r.pass = false;
    ++r.violation_count;
    if (r.violations.size() < 64) r.violations.push_back(v);
}

}  // namespace

ClassReport verify_class(const ReductionTrace& trace, const DeclaredClass& cls) {
    ClassReport r;
    r.label = cls.label;
    switch (cls.kind) {
        case DeclaredClass::Kind::turing:
            r.detail = "no usage bound to check";
            break;
        case DeclaredClass::Kind::wtt:
            for (std::uint64_t n = 1; n < trace.usage.size(); ++n) {
                const std::uint64_t q = cls.q(n);
                if (trace.usage[n] > q) record(r, {n, trace.usage[n], q});
                ++r.checked;
            }
            break;
        case DeclaredClass::Kind::bT:
            for (std::uint64_t k = 0; k < trace.per_bit_queries.size(); ++k) {
                if (trace.per_bit_queries[k] > cls.c) record(r, {k + 1, trace.per_bit_queries[k], cls.c});
                ++r.checked;
            }
            break;
        case DeclaredClass::Kind::tt:
            r.checked = trace.produced();
            if (trace.status != RunStatus::complete) {
                r.pass = false;
                r.detail = "run did not complete: " + to_string(trace.status) + " " + trace.detail;
            } else {
                r.detail = "total on this oracle within the step budget";
            }
            break;
    }
    return r;
}

}  // namespace cdl::red
