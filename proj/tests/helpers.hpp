#pragma once

#include <string>

#include "afc/json_io.hpp"

namespace afc::test {

inline std::string fixture_path(const std::string& name) {
  return std::string(AFC_FIXTURE_DIR) + "/" + name;
}

inline Json fixture(const std::string& name) {
  return load_json_file(fixture_path(name));
}

inline History fixture_history(const std::string& name) {
  return history_from_json(fixture(name));
}

inline AbstractExecution fixture_execution(const std::string& name) {
  return execution_from_json(fixture(name));
}

inline Program fixture_program(const std::string& name) {
  return program_from_json(fixture(name));
}

}  // namespace afc::test
