#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string_view>
#include <vector>

#include "tlsaa/protocol.hpp"
#include "tlsaa/record.hpp"
#include "tlsaa/record_store.hpp"

namespace tlsaa {

using RecordSnapshot = std::vector<std::shared_ptr<const DataRecord>>;

/// Search kernel over a fixed snapshot: filter by set index, SSE match, then
/// ABE verify on SSE hits only. The OpenMP version must return exactly what
/// the serial reference returns.
SearchResponse search_records_serial(const PairingContext& ctx, const SetPublicKeys& pks,
                                     const RecordSnapshot& records, const SearchRequest& req);
SearchResponse search_records_parallel(const PairingContext& ctx, const SetPublicKeys& pks,
                                       const RecordSnapshot& records, const SearchRequest& req, int workers = 0);

/// Honest-but-curious escrow server. Searches run concurrently against a
/// per-call snapshot; updates are serialised and swap whole records, so a
/// search sees either the old or the new record.
class EscrowServer {
 public:
  using LogSink = std::function<void(std::string_view)>;

  explicit EscrowServer(ServerParameters params, LogSink log = {});
  /// File-backed: loads the log at `path`, appending every later change.
  static std::unique_ptr<EscrowServer> open(const std::filesystem::path& path, LogSink log = {});
  static std::unique_ptr<EscrowServer> create(const std::filesystem::path& path, ServerParameters params,
                                              LogSink log = {});

  EscrowServer(const EscrowServer&) = delete;
  EscrowServer& operator=(const EscrowServer&) = delete;

  const ServerParameters& parameters() const noexcept { return params_; }
  const PairingContext& context() const noexcept { return params_.ctx; }

  /// Validates and stores `rec`, ignoring its record_id; returns the new id.
  RecordId store(DataRecord rec);
  std::optional<DataRecord> fetch(RecordId id) const;
  std::size_t size() const;
  std::vector<RecordId> ids() const;

  /// `workers` <= 0 uses the OpenMP default.
  SearchResponse search(const SearchRequest& req, int workers = 0) const;
  SearchResponse search_serial(const SearchRequest& req) const;

  /// Verifies the RTk against the current record, then replaces the supplied
  /// layers in one step. Throws UpdateRejected (record untouched) or BadRecord.
  RecordId reencrypt(const UpdateRequest& req);

  std::uint64_t abe_verification_count() const noexcept { return abe_verifications_.load(); }

 private:
  RecordSnapshot snapshot_for(const Subset& subset) const;
  void log(std::string_view line) const;

  ServerParameters params_;
  LogSink log_;
  std::unique_ptr<RecordLog> store_log_;

  mutable std::shared_mutex mutex_;
  std::map<RecordId, std::shared_ptr<const DataRecord>> records_;
  std::map<std::uint32_t, std::vector<RecordId>> by_set_;
  RecordId next_id_ = 1;
  mutable std::atomic<std::uint64_t> abe_verifications_{0};
};

}  // namespace tlsaa
