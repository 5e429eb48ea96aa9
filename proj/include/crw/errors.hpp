#pragma once

#include <stdexcept>
#include <string>

namespace crw {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CRW_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// graph
CRW_DEFINE_ERROR(InvalidSpec);
CRW_DEFINE_ERROR(GenerationFailure);
CRW_DEFINE_ERROR(ParseError);
CRW_DEFINE_ERROR(DisconnectedGraph);
CRW_DEFINE_ERROR(SelfLoop);

// markov
CRW_DEFINE_ERROR(LengthMismatch);
CRW_DEFINE_ERROR(BudgetExceeded);
CRW_DEFINE_ERROR(ConvergenceFailure);
CRW_DEFINE_ERROR(SolverFailure);
CRW_DEFINE_ERROR(TooLarge);

// simulation
CRW_DEFINE_ERROR(InvalidIds);
CRW_DEFINE_ERROR(AllCensored);

// bounds / experiments
CRW_DEFINE_ERROR(MissingQuantity);
CRW_DEFINE_ERROR(ConfigError);
CRW_DEFINE_ERROR(InsufficientPoints);

#undef CRW_DEFINE_ERROR

} // namespace crw
