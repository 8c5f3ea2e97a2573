#ifndef MOMENTA_ERRORS_HPP
#define MOMENTA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace momenta {

struct PairingNotPerfect : std::runtime_error {
    explicit PairingNotPerfect(const std::string& what) : std::runtime_error(what) {}
};

struct IntermediateRankExceeded : std::runtime_error {
    explicit IntermediateRankExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownSymbol : std::runtime_error {
    explicit UnknownSymbol(const std::string& what) : std::runtime_error(what) {}
};

struct FlavorMismatch : std::runtime_error {
    explicit FlavorMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ParityMismatch : std::runtime_error {
    explicit ParityMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct TooManyNodes : std::runtime_error {
    explicit TooManyNodes(const std::string& what) : std::runtime_error(what) {}
};

struct TargetNotReached : std::runtime_error {
    explicit TargetNotReached(const std::string& what) : std::runtime_error(what) {}
};

struct NoRobustCandidate : std::runtime_error {
    explicit NoRobustCandidate(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), pos(position) {}
    std::size_t pos;
};

} // namespace momenta

#endif
