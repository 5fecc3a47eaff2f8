#include "ab/csvio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ab {

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::string out = "iter,step,alpha,gamma,loss_g,loss_d,kde_ll,is,modes\n";
  for (const auto& r : rows) {
    out += std::to_string(r.iter);
    out += ',';
    out += r.step;
    out += ',';
    out += format_g9(r.alpha);
    out += ',';
    out += format_g9(r.gamma);
    out += ',';
    out += format_g9(r.loss_g);
    out += ',';
    out += format_g9(r.loss_d);
    out += ',';
    out += format_g9(r.kde_ll);
    out += ',';
    out += format_g9(r.is_score);
    out += ',';
    out += std::to_string(r.modes);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_table_csv(const std::string& header, const std::vector<std::string>& lines,
                     const std::string& path) {
  std::string out = header;
  out += '\n';
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);  // binary keeps LF endings as-is
  if (!f) throw Error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("short write: " + path);
}

bool make_dirs(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  return !ec;
}

}  // namespace ab
