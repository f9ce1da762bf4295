#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "clab/foliation.hpp"
#include "clab/scene.hpp"

namespace clab {

struct IdentityRow {
  std::string name;
  int points = 0;  // samples where the identity applies
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return max_residual <= tolerance; }
};

struct VerifyResult {
  std::vector<IdentityRow> rows;
  std::vector<std::string> notes;
  bool pass() const;
};

// Form identities at `samples` random points of the chart (seeded).
VerifyResult verify_chart(const CongruenceChart& chart, const Tolerances& tol, std::uint64_t seed, int samples = 400);
void write_verify_table(std::ostream& os, const VerifyResult& r);

// Portrait as SVG: leaves (branch 1 solid, branch 2 dashed), the lens
// discriminant, Sigma(n) in black, singular points as labelled glyphs.
void write_svg(std::ostream& os, const Portrait& p, const Domain& region, Lens lens, const std::string& title);

// Files written by a command; removed again unless commit() is reached.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir);
  ~Artifacts();
  Artifacts(const Artifacts&) = delete;
  Artifacts& operator=(const Artifacts&) = delete;

  // Throws IoError.
  void write(const std::filesystem::path& relative, const std::string& content);
  void commit() { committed_ = true; }
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  void make_dir(const std::filesystem::path& d);
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  std::vector<std::filesystem::path> created_;
  bool committed_ = false;
};

const std::vector<std::string>& command_names();

// Runs one command; artifacts go to scene.outputs.dir. Returns the exit status
// (1 when verify finds a residual above tolerance). Library errors propagate
// after partial artifacts are removed.
int run_command(const std::string& command, const Scene& scene, std::ostream& out);

}  // namespace clab
