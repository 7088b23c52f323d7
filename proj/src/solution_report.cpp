#include "fraxion/solution_report.hpp"

namespace fraxion {

const char* to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::p1: return "p1";
        case ProblemKind::p2: return "p2";
        case ProblemKind::p3: return "p3";
    }
    return "?";
}

const char* to_string(P1Case c) {
    switch (c) {
        case P1Case::Infeasible: return "Infeasible";
        case P1Case::SingleMinForced: return "SingleMinForced";
        case P1Case::SingleDose: return "SingleDose";
        case P1Case::AllMaxWindow: return "AllMaxWindow";
        case P1Case::HyperUniform: return "HyperUniform";
        case P1Case::HypoCompared: return "HypoCompared";
        case P1Case::OmegaZeroFamily: return "OmegaZeroFamily";
    }
    return "?";
}

const char* to_string(P2Case c) {
    switch (c) {
        case P2Case::SingleMinForced: return "SingleMinForced";
        case P2Case::AllMinForced: return "AllMinForced";
        case P2Case::HyperAllMinInteger: return "HyperAllMinInteger";
        case P2Case::HyperCompared: return "HyperCompared";
        case P2Case::HypoStructure: return "HypoStructure";
        case P2Case::OmegaZeroFamily: return "OmegaZeroFamily";
        case P2Case::EmptyWindowAllMin: return "EmptyWindowAllMin";
    }
    return "?";
}

std::string SolutionReport::case_name() const {
    if (std::holds_alternative<P1Case>(case_tag)) return to_string(std::get<P1Case>(case_tag));
    return to_string(std::get<P2Case>(case_tag));
}

}  // namespace fraxion
