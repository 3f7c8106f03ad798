#include "opqkd/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace opqkd {

std::string transcript_csv(const SessionResult& result) {
  std::ostringstream out;
  out << "round_id,alice_index,bob_index,checked,mismatch\n";
  for (const auto& r : result.records) {
    out << r.round_id << ',' << r.alice_index << ',' << r.bob_index << ',' << (r.checked ? 1 : 0)
        << ',' << (r.mismatch ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string eve_transcript_csv(const SessionResult& result) {
  std::ostringstream out;
  out << "round_id,variant,a_outcome,b_outcome,inferred_state,correct_inference\n";
  auto opt = [&](const std::optional<int>& v) {
    if (v) out << *v;
  };
  for (std::size_t i = 0; i < result.eve.size(); ++i) {
    const auto& e = result.eve[i];
    out << e.round_id << ',' << to_string(e.variant) << ',';
    opt(e.a_outcome);
    out << ',';
    opt(e.b_outcome);
    out << ',';
    opt(e.inferred_state);
    out << ',' << (e.inferred_state == result.records[i].alice_index ? 1 : 0) << '\n';
  }
  return out.str();
}

double eve_inference_accuracy(const SessionResult& result) {
  if (result.eve.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < result.eve.size(); ++i) {
    if (result.eve[i].inferred_state == result.records[i].alice_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(result.eve.size());
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace opqkd
