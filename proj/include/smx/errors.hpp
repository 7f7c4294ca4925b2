#pragma once

#include <stdexcept>
#include <string>

namespace smx {

/// Base class of all engine errors. `code()` is the stable machine-readable name
/// used in CLI error documents.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define SMX_DEFINE_ERROR(Name)                                                 \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

SMX_DEFINE_ERROR(IllDefinedProduct);
SMX_DEFINE_ERROR(InhomogeneousDimension);
SMX_DEFINE_ERROR(NotAlmostHomogeneous);
SMX_DEFINE_ERROR(UnsupportedDerivative);
SMX_DEFINE_ERROR(DivergentLimit);
SMX_DEFINE_ERROR(DivergentDirect);
SMX_DEFINE_ERROR(UnsupportedForm);
SMX_DEFINE_ERROR(ResonantDegree);
SMX_DEFINE_ERROR(TruncationTooSmall);
SMX_DEFINE_ERROR(OddDimension);
SMX_DEFINE_ERROR(DegenerateRegulators);
SMX_DEFINE_ERROR(NonIntegrable);
SMX_DEFINE_ERROR(UnsupportedGeometry);
SMX_DEFINE_ERROR(NoConvergence);
SMX_DEFINE_ERROR(FitFailure);
SMX_DEFINE_ERROR(ParseError);
SMX_DEFINE_ERROR(InvalidArgument);

#undef SMX_DEFINE_ERROR

} // namespace smx
