#include "exsim/output.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace exsim {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest exact
  return std::string(buf, res.ptr);
}

OutputWriter::OutputWriter(std::string dir) : m_dir(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(m_dir, ec);
  if (ec) throw OutputError("cannot create output directory '" + m_dir + "': " + ec.message());
}

void OutputWriter::write_text(const std::string& name, const std::string& content) {
  const std::string path = m_dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw OutputError("write failed for '" + path + "'");
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
  m_entries.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex}});
}

void OutputWriter::write_json(const std::string& name, const nlohmann::json& j) {
  write_text(name, j.dump(2) + "\n");
}

void OutputWriter::finalize(const nlohmann::json& meta) {
  nlohmann::json manifest;
  manifest["meta"] = meta;
  manifest["files"] = m_entries;
  const std::string path = m_dir + "/manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << "\n";
  if (!out) throw OutputError("write failed for '" + path + "'");
}

std::string run_record_csv(const RunRecord& rec) {
  std::ostringstream os;
  os << "t,norm,energy,center_x,center_y,width_x,width_y,participation,p_target,"
        "k_center_x,k_center_y\n";
  for (const RunSample& s : rec.samples) {
    os << format_double(s.t) << ',' << format_double(s.norm) << ',' << format_double(s.energy)
       << ',' << format_double(s.center[0]) << ',' << format_double(s.center[1]) << ','
       << format_double(s.width[0]) << ',' << format_double(s.width[1]) << ','
       << format_double(s.participation) << ',' << format_double(s.p_target) << ','
       << format_double(s.k_center[0]) << ',' << format_double(s.k_center[1]) << '\n';
  }
  return os.str();
}

std::string probability_grid_text(const ExcitonState& state) {
  const LatticeSpec& spec = state.realization->spec;
  const std::size_t nx = spec.extent[0];
  const std::size_t ny = spec.dims == 2 ? spec.extent[1] : 1;
  std::ostringstream os;
  std::size_t b = 0;  // basis index walks occupied cells in flat order
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      if (x) os << ' ';
      const std::size_t cell = y * nx + x;
      if (state.realization->occupied[cell]) {
        os << format_double(std::norm(state.amp[static_cast<Eigen::Index>(b)]));
        ++b;
      } else {
        os << '0';
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string kspectrum_csv(const KSpectrum& ks) {
  const LatticeSpec& spec = ks.spec;
  std::ostringstream os;
  if (spec.dims == 1) {
    os << "k,weight\n";
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(spec.extent[0]);
    // ascending folded index: nu_s in (-n/2, n/2]
    const std::ptrdiff_t lo = n % 2 ? -(n - 1) / 2 : -n / 2 + 1;
    for (std::ptrdiff_t i = lo; i <= n / 2; ++i) {
      const int raw = static_cast<int>((i + n) % n);
      os << format_double(ks.k_value(0, raw)) << ','
         << format_double(std::norm(ks.g[raw])) << '\n';
    }
  } else {
    os << "kx,ky,weight\n";
    const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(spec.extent[0]);
    const std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(spec.extent[1]);
    const std::ptrdiff_t lox = nx % 2 ? -(nx - 1) / 2 : -nx / 2 + 1;
    const std::ptrdiff_t loy = ny % 2 ? -(ny - 1) / 2 : -ny / 2 + 1;
    for (std::ptrdiff_t j = loy; j <= ny / 2; ++j) {
      const int rawy = static_cast<int>((j + ny) % ny);
      for (std::ptrdiff_t i = lox; i <= nx / 2; ++i) {
        const int rawx = static_cast<int>((i + nx) % nx);
        const Eigen::Index idx = static_cast<Eigen::Index>(rawy) * nx + rawx;
        os << format_double(ks.k_value(0, rawx)) << ',' << format_double(ks.k_value(1, rawy))
           << ',' << format_double(std::norm(ks.g[idx])) << '\n';
      }
    }
  }
  return os.str();
}

std::string enhancement_csv(const EnhancementReport& rep) {
  std::ostringstream os;
  os << "vacancy_fraction,realization,seed,attempts,p_initial,p_plain,p_masked,eta,chi,chi_capped\n";
  for (std::size_t r = 0; r < rep.rows.size(); ++r) {
    const RealizationOutcome& o = rep.rows[r];
    os << format_double(rep.vacancy_fraction) << ',' << r << ',' << o.seed << ',' << o.attempts
       << ',' << format_double(o.p_initial) << ',' << format_double(o.p_plain) << ','
       << format_double(o.p_masked) << ',' << format_double(o.eta) << ','
       << format_double(o.chi) << ',' << (o.chi_capped ? 1 : 0) << '\n';
  }
  return os.str();
}

nlohmann::json enhancement_json(const EnhancementReport& rep) {
  nlohmann::json j;
  j["vacancy_fraction"] = rep.vacancy_fraction;
  j["horizon"] = rep.horizon;
  j["realizations"] = rep.rows.size();
  j["block_count"] = rep.block_count;
  j["mean_eta"] = rep.mean_eta;
  j["ci_eta"] = rep.ci_eta;
  j["mean_chi"] = rep.mean_chi;
  j["ci_chi"] = rep.ci_chi;
  j["gain_ratio"] = rep.gain_ratio;
  return j;
}

}  // namespace exsim
