#pragma once

#include <string>
#include <vector>

namespace homsvm {

// %.17g: the shortest decimal form that round-trips an IEEE double exactly.
std::string format_g17(double v);

// Builds CSV traces with a `# key = value` comment block above the column
// header. Everything is accumulated in memory and written with LF endings,
// so identical inputs produce byte-identical files on every platform.
class TraceWriter {
  public:
    // Comments must all be added before the column header.
    void comment(const std::string& key, const std::string& value);
    void columns(const std::vector<std::string>& names);
    // Empty cells are legal and stand for "not available" in the trace format.
    void row(const std::vector<std::string>& cells);
    const std::string& content() const { return buf_; }
    void save(const std::string& path) const;

  private:
    std::string buf_;
    std::size_t ncols_ = 0;
    bool header_done_ = false;
};

}  // namespace homsvm
