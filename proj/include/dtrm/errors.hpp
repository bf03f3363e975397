#pragma once

#include <stdexcept>
#include <string>

namespace dtrm {

// Base class of all library errors. `name()` is a stable identifier used by
// the CLI when mapping failures to exit codes and stderr output.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define DTRM_DEFINE_ERROR(type)                                   \
  class type : public Error {                                     \
   public:                                                        \
    explicit type(const std::string& what) : Error(#type, what) {} \
  }

DTRM_DEFINE_ERROR(InvalidDistribution);
DTRM_DEFINE_ERROR(DomainError);
DTRM_DEFINE_ERROR(InvalidArgument);
DTRM_DEFINE_ERROR(InvalidModel);
DTRM_DEFINE_ERROR(RootCountMismatch);
DTRM_DEFINE_ERROR(RootRefinementFailure);
DTRM_DEFINE_ERROR(SingularInitialSystem);
DTRM_DEFINE_ERROR(NonProbabilisticSolution);
DTRM_DEFINE_ERROR(DegenerateRecursionFailure);
DTRM_DEFINE_ERROR(NonProbabilisticSequence);
DTRM_DEFINE_ERROR(ConsistencyFailure);
DTRM_DEFINE_ERROR(NetProfitViolation);
DTRM_DEFINE_ERROR(OracleTooLarge);
DTRM_DEFINE_ERROR(ResourceLimit);
DTRM_DEFINE_ERROR(ConfigError);

#undef DTRM_DEFINE_ERROR

}  // namespace dtrm
