#include "conicricci/trajectory.hpp"

namespace conicricci {

std::string to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::converged: return "converged";
        case TerminationReason::reached_t_end: return "t_end";
        case TerminationReason::blowup_cap: return "blowup_cap";
        case TerminationReason::step_failure: return "step_failure";
    }
    return "unknown";
}

int exit_code(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::converged: return 0;
        case TerminationReason::reached_t_end: return 2;
        case TerminationReason::blowup_cap: return 3;
        case TerminationReason::step_failure: return 4;
    }
    return 1;
}

}  // namespace conicricci
