#pragma once

#include <stdexcept>
#include <string>

namespace glrec {

// All module contract violations throw Error with a stable machine-parsable
// code, e.g. "UnknownNode: node 17 not in graph".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace glrec
