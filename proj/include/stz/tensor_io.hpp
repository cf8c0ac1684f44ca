#pragma once

#include <iosfwd>
#include <string>

#include "stz/tensor.hpp"

namespace stz {

// .ct3 tensor file: magic "CT3\0", u32 version (currently 1), three u32
// dims (n1, n2, n3), then n1*n2*n3 little-endian f64 (re, im) pairs in
// linearization order (mode-1 fastest).
void write_ct3(std::ostream& out, const ComplexTensor3& t);
ComplexTensor3 read_ct3(std::istream& in);

void save_ct3(const std::string& path, const ComplexTensor3& t);
ComplexTensor3 load_ct3(const std::string& path);

}  // namespace stz
