#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"
#include "regpipe/mmcore.hpp"

namespace regpipe::gen {

enum class GenErrc { GenerationFailed, BadBackend, BadPolicy };
using GenError = KindedError<GenErrc>;

enum class Stage { Metamodel, Instance, Ocl, ScenarioVehicle, ScenarioPre, ScenarioPost, ControlCode };
std::string_view to_string(Stage s);
std::optional<Stage> stage_from(std::string_view name);

struct Prompt {
  Stage stage = Stage::Metamodel;
  std::string key;
  std::string text;
};

struct Candidate {
  std::size_t index = 0;
  std::string text;
  bool valid = false;
  std::optional<std::string> canonical;
  std::string diagnostic;  // validator message when invalid
};

struct ConsensusPolicy {
  std::size_t n = 5;
  std::size_t min_valid = 1;
};

// Stage-independent inputs some validators need.
struct ValidationContext {
  const mm::MetaModel* metamodel = nullptr;
};

Candidate validate_candidate(Candidate c, Stage stage, const ValidationContext& ctx = {});

// Largest group of equal canonical forms wins; ties go to the group whose
// first member has the smallest index. Returns that first member.
Candidate select(const std::vector<Candidate>& candidates, const ConsensusPolicy& policy);

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::vector<std::string> generate(const Prompt& prompt, std::size_t n) = 0;
};

// Replays `<stage>.<key>.<i>.txt` (i = 1..n) from a directory; absent files
// are skipped.
class MockBackend final : public GeneratorBackend {
 public:
  explicit MockBackend(std::filesystem::path dir);
  std::vector<std::string> generate(const Prompt& prompt, std::size_t n) override;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Accepts `mock:<dir>`.
std::unique_ptr<GeneratorBackend> make_backend(std::string_view selector);

struct ConsensusResult {
  Candidate chosen;
  std::vector<Candidate> candidates;
};

ConsensusResult generate_with_consensus(GeneratorBackend& backend, const Prompt& prompt,
                                        const ConsensusPolicy& policy, const ValidationContext& ctx = {});

}  // namespace regpipe::gen

namespace regpipe {
template <>
std::string_view error_kind_name(gen::GenErrc kind) noexcept;
}  // namespace regpipe
