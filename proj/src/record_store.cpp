#include "tlsaa/record_store.hpp"

#include <algorithm>
#include <iterator>
#include <map>

#include "tlsaa/codec.hpp"
#include "tlsaa/errors.hpp"

namespace tlsaa {
namespace {

constexpr std::string_view kMagic = "3LSAA-STORE\n";

void write_u32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

void write_framed(std::ofstream& out, const Bytes& bytes) {
  write_u32(out, static_cast<std::uint32_t>(bytes.size()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

RecordLog RecordLog::create(const std::filesystem::path& path, const ServerParameters& params) {
  if (std::filesystem::exists(path)) fail(ErrorCode::io, "record store already exists: " + path.string());
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot create " + path.string());
    out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
    write_framed(out, params.ctx.header());
    ByteWriter w(params.ctx);
    w.u32(static_cast<std::uint32_t>(params.pks.size()));
    for (const auto& pk : params.pks.keys) w.element(pk);
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  }
  return RecordLog(path, params.ctx);
}

RecordLog::RecordLog(const std::filesystem::path& path, PairingContext ctx)
    : ctx_(std::move(ctx)), out_(path, std::ios::binary | std::ios::app) {
  if (!out_) fail(ErrorCode::io, "cannot open " + path.string() + " for append");
}

void RecordLog::append(const DataRecord& rec) {
  ByteWriter w(ctx_);
  write(w, rec);
  write_framed(out_, w.bytes());
  out_.flush();
  if (!out_) fail(ErrorCode::io, "record store append failed");
}

RecordLog::Contents RecordLog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), data.begin())) {
    fail(ErrorCode::malformed, path.string() + " is not a record store");
  }
  const ByteView rest = ByteView(data).subspan(kMagic.size());

  // The header has to be parsed before a context exists; peel it manually.
  if (rest.size() < 4) fail(ErrorCode::malformed, "truncated store header");
  const std::uint32_t hlen = (std::uint32_t{rest[0]} << 24) | (std::uint32_t{rest[1]} << 16) |
                             (std::uint32_t{rest[2]} << 8) | rest[3];
  if (rest.size() < 4 + std::size_t{hlen}) fail(ErrorCode::malformed, "truncated store header");
  PairingContext ctx = PairingContext::from_header(rest.subspan(4, hlen));

  ByteReader r(ctx, rest.subspan(4 + hlen));
  Contents contents{{ctx, {}}, {}};
  const std::uint32_t n = r.u32();
  if (n == 0 || n > (1u << 16)) fail(ErrorCode::malformed, "bad set count in store");
  for (std::uint32_t i = 0; i < n; ++i) contents.params.pks.keys.push_back(r.element(Side::left));

  std::map<RecordId, DataRecord> latest;
  while (!r.done()) {
    ByteReader entry(ctx, r.blob());
    DataRecord rec = read_record(entry);
    entry.expect_done();
    latest.insert_or_assign(rec.record_id, std::move(rec));
  }
  for (auto& [id, rec] : latest) contents.records.push_back(std::move(rec));
  return contents;
}

}  // namespace tlsaa
