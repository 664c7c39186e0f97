#include "susysep/spectrum.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <locale>
#include <sstream>

#include "json.hpp"

namespace susysep {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void SpectrumTable::add_metadata(std::string key, std::string value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> SpectrumTable::metadata_value(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<double> SpectrumTable::energies() const {
  std::vector<double> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.energy);
  return out;
}

namespace {

bool two_index(const SpectrumTable& t) {
  for (const auto& l : t.levels) {
    if (l.m) return true;
  }
  return false;
}

}  // namespace

std::string SpectrumTable::to_json() const {
  nlohmann::ordered_json j;
  j["branch"] = branch;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  j["metadata"] = meta;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  const bool pairs = two_index(*this);
  for (const auto& l : levels) {
    nlohmann::ordered_json e;
    if (pairs) {
      e["n"] = l.n;
      e["m"] = l.m ? nlohmann::ordered_json(*l.m) : nlohmann::ordered_json(nullptr);
    } else {
      e["k"] = l.n;
    }
    e["E"] = l.energy;
    e["degeneracy"] = l.degeneracy;
    e["retained"] = l.retained;
    e["notes"] = l.notes;
    e["provenance"] = l.provenance;
    arr.push_back(std::move(e));
  }
  j["levels"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string SpectrumTable::to_csv() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  const bool pairs = two_index(*this);
  os << (pairs ? "n,m,E,retained\n" : "k,E,retained\n");
  for (const auto& l : levels) {
    os << l.n << ',';
    if (pairs) os << (l.m ? std::to_string(*l.m) : std::string()) << ',';
    os << format_double(l.energy) << ',' << (l.retained ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace susysep
