#ifndef WCURV_REPORT_HPP
#define WCURV_REPORT_HPP

#include <string>

namespace wcurv {

// temp file + rename in the target directory
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace wcurv

#endif
