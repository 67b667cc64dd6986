#include "homsvm/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace homsvm {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void TraceWriter::comment(const std::string& key, const std::string& value) {
    if (header_done_)
        throw std::logic_error("TraceWriter: comments must precede the column header");
    buf_ += "# ";
    buf_ += key;
    buf_ += " = ";
    buf_ += value;
    buf_ += '\n';
}

void TraceWriter::columns(const std::vector<std::string>& names) {
    if (header_done_) throw std::logic_error("TraceWriter: column header already written");
    if (names.empty()) throw std::logic_error("TraceWriter: need at least one column");
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) buf_ += ',';
        buf_ += names[i];
    }
    buf_ += '\n';
    ncols_ = names.size();
    header_done_ = true;
}

void TraceWriter::row(const std::vector<std::string>& cells) {
    if (!header_done_) throw std::logic_error("TraceWriter: column header missing");
    if (cells.size() != ncols_)
        throw std::logic_error("TraceWriter: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
}

void TraceWriter::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("TraceWriter: cannot open " + path + " for writing");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw std::runtime_error("TraceWriter: short write to " + path);
}

}  // namespace homsvm
