#ifndef CONIWAVE_IO_HPP
#define CONIWAVE_IO_HPP

#include <string>
#include <vector>

#include "coniwave/grid.hpp"

namespace coniwave {

// CSV with a header row and full 17-significant-digit floats.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    ~CsvWriter();

private:
    void* f_;
    std::size_t cols_;
};

// Little-endian (re, im) float64 pairs, row-major, plus a JSON sidecar
// {dims, L, N, time, mode} (and component count for two-component fields).
void dump_profile(const std::string& path_base, const ProfileGrid& g);
void dump_field(const std::string& path_base, const Field2& f, double time);

ProfileGrid load_profile(const std::string& path_base);

} // namespace coniwave

#endif
