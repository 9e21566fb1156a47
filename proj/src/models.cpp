#include "tweetpolarity/models.hpp"

#include <stdexcept>

namespace tp {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::Cnn ? "cnn" : "bilstm"; }

ModelKind parse_model_kind(std::string_view name) {
  if (name == "cnn") return ModelKind::Cnn;
  if (name == "bilstm" || name == "lstm") return ModelKind::BiLstm;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "' (expected cnn or bilstm)");
}

}  // namespace tp
