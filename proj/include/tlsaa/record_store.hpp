#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include "tlsaa/record.hpp"
#include "tlsaa/sse.hpp"

namespace tlsaa {

/// Append-only record log:
///
///   "3LSAA-STORE\n" | u32 len | parameter header | u32 n | n left elements (pk_i)
///   then repeated   u32 len | record body
///
/// A record id may appear several times; the last entry wins.
class RecordLog {
 public:
  struct Contents {
    ServerParameters params;
    std::vector<DataRecord> records;  // latest version per id, ascending id
  };

  /// Writes a fresh log; refuses to overwrite an existing file.
  static RecordLog create(const std::filesystem::path& path, const ServerParameters& params);
  static Contents load(const std::filesystem::path& path);
  /// Opens an existing log for appending.
  RecordLog(const std::filesystem::path& path, PairingContext ctx);

  void append(const DataRecord& rec);

 private:
  PairingContext ctx_;
  std::ofstream out_;
};

}  // namespace tlsaa
