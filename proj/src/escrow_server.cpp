#include "tlsaa/escrow_server.hpp"

#include <omp.h>

#include <algorithm>
#include <mutex>

#include "tlsaa/errors.hpp"

namespace tlsaa {
namespace {

struct RecordOutcome {
  bool sse_match = false;
  bool abe_evaluated = false;
  std::optional<SearchMatch> match;
  std::optional<RecordFailure> failure;
};

// One record through the pipeline. ABE runs only after an SSE hit.
RecordOutcome evaluate(const PairingContext& ctx, const DataRecord& rec, const SearchRequest& req,
                       const GroupElement& subset_product) {
  RecordOutcome out;
  if (!sse_match_any(ctx, rec.sse, req.token.token, subset_product)) return out;
  out.sse_match = true;
  try {
    out.abe_evaluated = true;
    if (abe_verify(ctx, rec.abe, req.credentials, req.blinded)) {
      out.match = SearchMatch{rec.record_id, rec.abe.attrs, rec.recovery, rec.payload, req.token.subset};
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::incomplete_policy) throw;
    out.abe_evaluated = false;
    out.failure = RecordFailure{rec.record_id, e.code()};
  }
  return out;
}

void accumulate(SearchResponse& resp, RecordOutcome&& o) {
  resp.stats.sse_matches += o.sse_match;
  resp.stats.abe_verifications += o.abe_evaluated;
  if (o.match) resp.matches.push_back(std::move(*o.match));
  if (o.failure) resp.failures.push_back(*o.failure);
}

bool in_subset(const DataRecord& rec, const Subset& subset) { return subset.contains(rec.set_index); }

void check_request(const PairingContext& ctx, const SetPublicKeys& pks, const SearchRequest& req) {
  req.token.subset.validate(pks.size());
  if (!ctx.is_valid(req.token.token) || req.token.token.side() != Side::left) {
    fail(ErrorCode::malformed, "search token must be a left element");
  }
  if (!ctx.is_valid(req.blinded.element) || req.blinded.element.side() != Side::left) {
    fail(ErrorCode::malformed, "blinded identity must be a left element");
  }
}

}  // namespace

SearchResponse search_records_serial(const PairingContext& ctx, const SetPublicKeys& pks,
                                     const RecordSnapshot& records, const SearchRequest& req) {
  check_request(ctx, pks, req);
  const GroupElement product = pks.product(ctx, req.token.subset);
  SearchResponse resp;
  for (const auto& rec : records) {
    if (!in_subset(*rec, req.token.subset)) continue;
    ++resp.stats.candidates;
    accumulate(resp, evaluate(ctx, *rec, req, product));
  }
  auto by_id = [](const auto& a, const auto& b) { return a.record_id < b.record_id; };
  std::sort(resp.matches.begin(), resp.matches.end(), by_id);
  std::sort(resp.failures.begin(), resp.failures.end(), by_id);
  return resp;
}

SearchResponse search_records_parallel(const PairingContext& ctx, const SetPublicKeys& pks,
                                       const RecordSnapshot& records, const SearchRequest& req, int workers) {
  check_request(ctx, pks, req);
  const GroupElement product = pks.product(ctx, req.token.subset);

  std::vector<const DataRecord*> candidates;
  candidates.reserve(records.size());
  for (const auto& rec : records) {
    if (in_subset(*rec, req.token.subset)) candidates.push_back(rec.get());
  }

  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  std::vector<RecordOutcome> outcomes(candidates.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr error;
  std::mutex error_mutex;

#pragma omp parallel for num_threads(threads) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      outcomes[i] = evaluate(ctx, *candidates[i], req, product);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  SearchResponse resp;
  resp.stats.candidates = candidates.size();
  for (auto& o : outcomes) accumulate(resp, std::move(o));
  auto by_id = [](const auto& a, const auto& b) { return a.record_id < b.record_id; };
  std::sort(resp.matches.begin(), resp.matches.end(), by_id);
  std::sort(resp.failures.begin(), resp.failures.end(), by_id);
  return resp;
}

EscrowServer::EscrowServer(ServerParameters params, LogSink log)
    : params_(std::move(params)), log_(std::move(log)) {}

std::unique_ptr<EscrowServer> EscrowServer::open(const std::filesystem::path& path, LogSink log) {
  RecordLog::Contents contents = RecordLog::load(path);
  auto server = std::make_unique<EscrowServer>(contents.params, std::move(log));
  for (auto& rec : contents.records) {
    server->next_id_ = std::max(server->next_id_, rec.record_id + 1);
    server->by_set_[rec.set_index].push_back(rec.record_id);
    const RecordId id = rec.record_id;
    server->records_.emplace(id, std::make_shared<const DataRecord>(std::move(rec)));
  }
  server->store_log_ = std::make_unique<RecordLog>(path, server->params_.ctx);
  server->log("opened store with " + std::to_string(server->records_.size()) + " records");
  return server;
}

std::unique_ptr<EscrowServer> EscrowServer::create(const std::filesystem::path& path, ServerParameters params,
                                                   LogSink log) {
  RecordLog created = RecordLog::create(path, params);
  auto server = std::make_unique<EscrowServer>(std::move(params), std::move(log));
  server->store_log_ = std::make_unique<RecordLog>(std::move(created));
  return server;
}

void EscrowServer::log(std::string_view line) const {
  if (log_) log_(line);
}

RecordId EscrowServer::store(DataRecord rec) {
  validate_record(context(), rec, params_.pks.size());
  std::unique_lock lock(mutex_);
  rec.record_id = next_id_++;
  const RecordId id = rec.record_id;
  const std::uint32_t set = rec.set_index;
  auto stored = std::make_shared<const DataRecord>(std::move(rec));
  if (store_log_) store_log_->append(*stored);
  records_.emplace(id, std::move(stored));
  by_set_[set].push_back(id);
  log("stored record " + std::to_string(id) + " in set " + std::to_string(set));
  return id;
}

std::optional<DataRecord> EscrowServer::fetch(RecordId id) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return *it->second;
}

std::size_t EscrowServer::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<RecordId> EscrowServer::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<RecordId> out;
  for (const auto& [id, rec] : records_) out.push_back(id);
  return out;
}

RecordSnapshot EscrowServer::snapshot_for(const Subset& subset) const {
  std::shared_lock lock(mutex_);
  RecordSnapshot out;
  for (std::uint32_t set : subset.indices()) {
    auto it = by_set_.find(set);
    if (it == by_set_.end()) continue;
    for (RecordId id : it->second) out.push_back(records_.at(id));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a->record_id < b->record_id; });
  return out;
}

SearchResponse EscrowServer::search(const SearchRequest& req, int workers) const {
  req.token.subset.validate(params_.pks.size());
  SearchResponse resp = search_records_parallel(context(), params_.pks, snapshot_for(req.token.subset), req, workers);
  abe_verifications_ += resp.stats.abe_verifications;
  log("search: " + std::to_string(resp.stats.candidates) + " candidates, " + std::to_string(resp.stats.sse_matches) +
      " sse matches, " + std::to_string(resp.matches.size()) + " returned");
  return resp;
}

SearchResponse EscrowServer::search_serial(const SearchRequest& req) const {
  req.token.subset.validate(params_.pks.size());
  SearchResponse resp = search_records_serial(context(), params_.pks, snapshot_for(req.token.subset), req);
  abe_verifications_ += resp.stats.abe_verifications;
  return resp;
}

RecordId EscrowServer::reencrypt(const UpdateRequest& req) {
  const PairingContext& ctx = context();
  if (!req.sse && !req.abe && !req.recovery && !req.payload) fail(ErrorCode::bad_record, "update replaces nothing");

  std::unique_lock lock(mutex_);
  auto it = records_.find(req.record_id);
  if (it == records_.end()) fail(ErrorCode::not_found, "no record " + std::to_string(req.record_id));
  const DataRecord& current = *it->second;

  bool authorised = false;
  try {
    req.rtk.subset.validate(params_.pks.size());
    authorised = ctx.is_valid(req.rtk.token) && req.rtk.token.side() == Side::left &&
                 req.rtk.subset.contains(current.set_index) &&
                 verify_update_token(ctx, current.sse, req.rtk, params_.pks);
  } catch (const Error&) {
    authorised = false;
  }
  if (!authorised) {
    log("update rejected for record " + std::to_string(req.record_id));
    fail(ErrorCode::update_rejected, "re-encryption token does not verify for record " + std::to_string(req.record_id));
  }

  DataRecord next = current;
  if (req.sse) next.sse = *req.sse;
  if (req.abe) next.abe = *req.abe;
  if (req.recovery) next.recovery = *req.recovery;
  if (req.payload) next.payload = *req.payload;
  validate_record(ctx, next, params_.pks.size());

  auto replacement = std::make_shared<const DataRecord>(std::move(next));
  if (store_log_) store_log_->append(*replacement);
  it->second = std::move(replacement);
  log("updated record " + std::to_string(req.record_id));
  return req.record_id;
}

}  // namespace tlsaa
