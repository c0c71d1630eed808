/**
 * @file errors.hpp
 * @brief Error hierarchy shared by all modules.
 *
 * Every failure mode that callers are expected to handle gets its own type
 * with a stable machine-readable code string.  The CLI maps these to exit
 * code 1 and a JSON error object; library users can catch by type.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace qrep {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define QREP_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                   \
    public:                                                       \
        explicit NAME(const std::string& msg)                     \
            : Error(#NAME, msg) {}                                \
    }

QREP_DEFINE_ERROR(NumericalFailure);
QREP_DEFINE_ERROR(ClusterGapTooSmall);
QREP_DEFINE_ERROR(BadParameter);
QREP_DEFINE_ERROR(QuiverMismatch);
QREP_DEFINE_ERROR(DisconnectedGraph);
QREP_DEFINE_ERROR(NotASink);
QREP_DEFINE_ERROR(NotASource);
QREP_DEFINE_ERROR(BadEmbedding);
QREP_DEFINE_ERROR(DegenerateIdempotent);
QREP_DEFINE_ERROR(NotAPathQuiver);
QREP_DEFINE_ERROR(NotEquiorientedPath);
QREP_DEFINE_ERROR(CertInvalid);
QREP_DEFINE_ERROR(BadOrientation);
QREP_DEFINE_ERROR(GraphMismatch);
QREP_DEFINE_ERROR(GraphIsDynkin);
QREP_DEFINE_ERROR(BadInput);

#undef QREP_DEFINE_ERROR

} // namespace qrep
