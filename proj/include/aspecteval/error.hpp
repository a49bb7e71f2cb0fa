#pragma once

#include <stdexcept>
#include <string>

namespace aspecteval {

// Every failure in the library throws Error with a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    empty_phrase,
    dimension_mismatch,
    zero_vector,
    missing_embedding,
    provider_unreachable,
    provider_dimension_changed,
    non_finite_cost,
    index_out_of_range,
    parse_error,
    duplicate_doc_id,
    conflicting_duplicate_aspect,
    unknown_doc_id,
    length_mismatch,
    empty_input,
    ragged_ratings,
    invalid_config,
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace aspecteval
