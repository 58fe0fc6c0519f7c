#include "uiadapt/error.hpp"

namespace uiadapt {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain_error";
    case ErrorKind::Range: return "range_error";
    case ErrorKind::Config: return "config_error";
    case ErrorKind::Contract: return "contract_error";
    case ErrorKind::Model: return "model_error";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::EpisodeFinished: return "episode_finished";
    case ErrorKind::SessionFinished: return "session_finished";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Validation: return "validation_error";
    case ErrorKind::Divergence: return "training_divergence";
    case ErrorKind::Io: return "io_error";
  }
  return "unknown_error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace uiadapt
