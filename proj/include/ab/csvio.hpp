#pragma once

#include <string>
#include <vector>

#include "ab/metrics.hpp"

namespace ab {

// %.9g rendering used for every float that lands in a CSV
std::string format_g9(double v);

// UTF-8, LF line endings, header
// iter,step,alpha,gamma,loss_g,loss_d,kde_ll,is,modes
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

// generic small-table writer for non-training artifacts (variance study)
void write_table_csv(const std::string& header, const std::vector<std::string>& lines,
                     const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

bool make_dirs(const std::string& path);

}  // namespace ab
