// Command-line driver. Each actor keeps its state in its own home directory;
// messages between actors are the wire-format files.
//
//   server home: params.json store.log server.log
//   aa home:     authority.json public.json
//   owner home:  owner.json
//   user home:   user.json

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tlsaa/actors.hpp"
#include "tlsaa/codec.hpp"
#include "tlsaa/record_store.hpp"
#include "tlsaa/wire.hpp"

namespace fs = std::filesystem;
using namespace tlsaa;

namespace {

constexpr int kOk = 0;
constexpr int kProtocolError = 1;
constexpr int kUsage = 2;
constexpr int kNoMatch = 3;
constexpr std::uint64_t kDefaultOracleQ = (1ull << 61) - 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + p.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::io, "cannot write " + p.string());
  }
  fs::rename(tmp, p);
}

// --- randomness -------------------------------------------------------------

std::string g_seed;  // hex, empty = system randomness
std::string g_verb;

/// Seeded streams are keyed by the seed, the verb and `state` (the inputs that
/// distinguish one call from the next), so reruns of a script reproduce their
/// output while two different calls never share a stream.
std::unique_ptr<RandomSource> rng_for(std::string_view state = {}) {
  if (g_seed.empty()) return std::make_unique<SystemRandom>();
  Bytes seed;
  if (g_seed.size() % 2) throw UsageError("--seed must be an even number of hex digits");
  for (std::size_t i = 0; i < g_seed.size(); i += 2) {
    const std::string byte = g_seed.substr(i, 2);
    if (byte.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) throw UsageError("--seed must be hex");
    seed.push_back(static_cast<std::uint8_t>(std::stoul(byte, nullptr, 16)));
  }
  for (std::string_view part : {std::string_view(g_verb), state}) {
    seed.push_back(0);
    seed.insert(seed.end(), part.begin(), part.end());
  }
  return std::make_unique<SeededRandom>(std::span<const std::uint8_t>(seed));
}

// --- homes ------------------------------------------------------------------

ServerParameters load_params(const fs::path& server_home) {
  return wire::decode_server_parameters(read_file(server_home / "params.json"));
}

std::unique_ptr<EscrowServer> open_server(const fs::path& server_home) {
  const fs::path log_path = server_home / "server.log";
  auto sink = [log_path](std::string_view line) {
    std::ofstream out(log_path, std::ios::app);
    out << line << '\n';
  };
  return EscrowServer::open(server_home / "store.log", sink);
}

OwnerActor load_owner(const fs::path& home, const ServerParameters& params) {
  OwnerState st = decode_owner_state(params.ctx, read_file(home / "owner.json"));
  OwnerActor owner(params, st.secrets);
  for (const auto& k : st.authorities) owner.add_authority(k);
  return owner;
}

void save_owner(const fs::path& home, const PairingContext& ctx, const OwnerActor& owner) {
  std::vector<AuthorityPublicKeys> aas;
  for (const auto& [attr, keys] : owner.authorities()) aas.push_back(keys);
  write_file(home / "owner.json", encode_owner_state(ctx, owner.secrets(), aas));
}

AuthorityActor load_authority(const fs::path& home, const PairingContext& ctx) {
  return AuthorityActor(ctx, decode_authority_state(ctx, read_file(home / "authority.json")));
}

AuthorityPublicKeys load_authority_public(const fs::path& home, const PairingContext& ctx) {
  return wire::decode<AuthorityPublicKeys>(ctx, read_file(home / "public.json"));
}

UserState load_user(const fs::path& home, const PairingContext& ctx) {
  return decode_user_state(ctx, read_file(home / "user.json"));
}

// --- verbs ------------------------------------------------------------------

struct Options {
  std::string home, server_home, backend = "oracle", attribute, owner_id, in, out, out_dir, keyword, subset, gid,
      consent, response, request_out, file;
  std::vector<std::string> members, keywords, policy, aa_homes;
  std::uint64_t oracle_q = kDefaultOracleQ;
  std::size_t sets = 0;
  std::uint32_t set = 0;
  RecordId record = 0;
  int workers = 0;
};

int setup_server(const Options& o) {
  PairingContext ctx = o.backend == "curve" ? PairingContext::curve() : PairingContext::oracle(o.oracle_q);
  auto rng = rng_for();
  const ServerParameters params = server_setup(ctx, o.sets, *rng);
  const fs::path home(o.home);
  fs::create_directories(home);
  EscrowServer::create(home / "store.log", params);
  write_file(home / "params.json", wire::encode(params));
  std::cout << "server ready: " << o.sets << " sets, backend " << to_string(ctx.backend()) << "\n";
  return kOk;
}

int setup_aa(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  const fs::path home(o.home);
  if (fs::exists(home / "authority.json")) fail(ErrorCode::io, home.string() + " already holds an authority");
  auto rng = rng_for(wire::encode(params) + o.attribute);
  AuthorityActor aa(params.ctx, o.attribute, *rng);
  for (const auto& m : o.members) aa.enroll(m);
  write_file(home / "authority.json", encode_authority_state(params.ctx, aa.secrets()));
  write_file(home / "public.json", wire::encode(params.ctx, aa.public_keys()));
  std::cout << "authority for " << aa.attribute_id() << " with " << o.members.size() << " members\n";
  return kOk;
}

int setup_owner(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  const fs::path home(o.home);
  if (fs::exists(home / "owner.json")) fail(ErrorCode::io, home.string() + " already holds an owner");
  auto rng = rng_for(wire::encode(params) + o.owner_id);
  OwnerActor owner(params, o.owner_id, *rng);
  save_owner(home, params.ctx, owner);
  std::cout << "owner ready\n";
  return kOk;
}

void register_authorities(OwnerActor& owner, const PairingContext& ctx, const std::vector<std::string>& aa_homes) {
  for (const auto& h : aa_homes) owner.add_authority(load_authority_public(h, ctx));
}

int publish(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  auto owner = load_owner(o.home, params);
  register_authorities(owner, params.ctx, o.aa_homes);
  const std::string plaintext = read_file(o.in);
  auto server = open_server(o.server_home);
  auto rng = rng_for(std::to_string(server->size()) + '\n' + plaintext);
  const RecordId id = owner_publish(owner, *server, as_bytes(plaintext), o.keywords, o.policy, o.set, *rng);
  save_owner(o.home, params.ctx, owner);
  std::cout << id << "\n";
  return kOk;
}

int consent(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  auto owner = load_owner(o.home, params);
  const ConsentBundle bundle = owner.consent(o.keyword, Subset::parse(o.subset));
  write_file(o.out, wire::encode(params.ctx, bundle));
  return kOk;
}

int issue(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  const fs::path home(o.home);
  UserState st;
  if (fs::exists(home / "user.json")) {
    st = load_user(home, params.ctx);
    if (st.gid != o.gid) throw UsageError("user home belongs to another GID");
  } else {
    st.gid = o.gid;
  }
  UserActor user(params, st.gid);
  auto rng = rng_for(encode_user_state(params.ctx, st));
  // A new request: fresh blinding, and the grants of the previous one are dropped.
  const RequestBlinding b = user.begin_request(*rng);
  st.pending = b;
  st.grants.clear();
  int refused = 0;
  for (const auto& h : o.aa_homes) {
    const AuthorityActor aa = load_authority(h, params.ctx);
    const std::string req_text = wire::encode(params.ctx, user.credential_request(b, aa.attribute_id()));
    try {
      const std::string grant = wire::encode(params.ctx, aa.issue(user.gid(), wire::decode<CredentialRequest>(params.ctx, req_text)));
      st.grants.push_back(wire::decode<CredentialGrant>(params.ctx, grant));
      std::cout << "granted " << aa.attribute_id() << "\n";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unauthorized) throw;
      std::cout << "refused " << aa.attribute_id() << "\n";
      ++refused;
    }
  }
  write_file(home / "user.json", encode_user_state(params.ctx, st));
  return kOk;
}

int search(const Options& o) {
  auto server = open_server(o.server_home);
  const ServerParameters& params = server->parameters();
  const UserState st = load_user(o.home, params.ctx);
  if (!st.pending) fail(ErrorCode::invalid_argument, "no credentials requested yet; run issue first");
  UserActor user(params, st.gid);
  const auto bundle = wire::decode<ConsentBundle>(params.ctx, read_file(o.consent));
  const std::string req = wire::encode(params.ctx, user.search_request(bundle, *st.pending, st.grants));
  if (!o.request_out.empty()) write_file(o.request_out, req);
  const SearchResponse resp = server->search(wire::decode<SearchRequest>(params.ctx, req), o.workers);
  write_file(o.out, wire::encode(params.ctx, resp));
  for (const auto& m : resp.matches) std::cout << "match " << m.record_id << "\n";
  for (const auto& f : resp.failures) std::cout << "failed " << f.record_id << " " << to_string(f.code) << "\n";
  return resp.matches.empty() ? kNoMatch : kOk;
}

int decrypt(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  const UserState st = load_user(o.home, params.ctx);
  if (!st.pending) fail(ErrorCode::invalid_argument, "no pending request in user home");
  const auto bundle = wire::decode<ConsentBundle>(params.ctx, read_file(o.consent));
  const auto resp = wire::decode<SearchResponse>(params.ctx, read_file(o.response));
  UserActor user(params, st.gid);
  const DecryptionTokenSet tokens = user.decryption_tokens(bundle, *st.pending, st.grants);
  int opened = 0;
  int failed = 0;
  for (const auto& m : resp.matches) {
    try {
      const Bytes plain = user.open(m, tokens);
      const fs::path out = fs::path(o.out_dir) / ("record-" + std::to_string(m.record_id) + ".bin");
      write_file(out, std::string_view(reinterpret_cast<const char*>(plain.data()), plain.size()));
      std::cout << out.string() << "\n";
      ++opened;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::wrong_key && e.code() != ErrorCode::incomplete_tokens) throw;
      std::cerr << "record " << m.record_id << ": " << e.what() << "\n";
      ++failed;
    }
  }
  if (failed && !opened) return kProtocolError;
  return opened ? kOk : kNoMatch;
}

int update(const Options& o) {
  const ServerParameters params = load_params(o.server_home);
  auto owner = load_owner(o.home, params);
  register_authorities(owner, params.ctx, o.aa_homes);
  UpdateSpec spec;
  if (!o.keywords.empty()) spec.keywords = o.keywords;
  if (!o.policy.empty()) spec.policy = o.policy;
  if (!o.in.empty()) {
    const std::string text = read_file(o.in);
    spec.plaintext = Bytes(text.begin(), text.end());
  }
  auto server = open_server(o.server_home);
  const auto current = server->fetch(o.record);
  if (!current) fail(ErrorCode::not_found, "server: no record " + std::to_string(o.record));
  auto rng = rng_for(wire::encode(params.ctx, *current));
  owner_update(owner, *server, o.record, Subset::parse(o.subset), spec, *rng);
  save_owner(o.home, params.ctx, owner);
  std::cout << "updated " << o.record << "\n";
  return kOk;
}

// --- inspect ------------------------------------------------------------------

void describe(std::ostream& os, const DataRecord& r) {
  os << "record " << r.record_id << "\n  set: " << r.set_index
     << "\n  keyword tags: " << r.sse.tagged_keywords.size() << "\n  policy:";
  for (const auto& a : r.abe.attrs) os << " " << a;
  os << "\n  payload: " << r.payload.body.size() << " ciphertext bytes\n";
}

int inspect(const Options& o) {
  const std::string text = read_file(o.file);
  std::ostream& os = std::cout;
  if (text.rfind("3LSAA-STORE\n", 0) == 0) {
    const auto contents = RecordLog::load(o.file);
    os << "record store, backend " << to_string(contents.params.ctx.backend()) << ", "
       << contents.params.pks.size() << " sets, " << contents.records.size() << " records\n";
    for (const auto& r : contents.records) describe(os, r);
    return kOk;
  }
  const std::string type = wire::message_type(text);
  if (type == "server-parameters") {
    const auto p = wire::decode_server_parameters(text);
    os << type << ", backend " << to_string(p.ctx.backend()) << ", " << p.pks.size() << " sets\n";
    return kOk;
  }
  const PairingContext ctx = wire::message_context(text);
  os << type << ", backend " << to_string(ctx.backend()) << "\n";
  if (type == "record") {
    describe(os, wire::decode<DataRecord>(ctx, text));
  } else if (type == "search-response") {
    const auto r = wire::decode<SearchResponse>(ctx, text);
    for (const auto& m : r.matches) os << "  match " << m.record_id << " set " << m.subset.to_string() << "\n";
    for (const auto& f : r.failures) os << "  failed " << f.record_id << " " << to_string(f.code) << "\n";
    os << "  candidates " << r.stats.candidates << ", sse matches " << r.stats.sse_matches << ", abe checks "
       << r.stats.abe_verifications << "\n";
  } else if (type == "search-request") {
    const auto r = wire::decode<SearchRequest>(ctx, text);
    os << "  subset " << r.token.subset.to_string() << ", credentials:";
    for (const auto& c : r.credentials) os << " " << c.attribute_id;
    os << "\n";
  } else if (type == "consent") {
    os << "  subset " << wire::decode<ConsentBundle>(ctx, text).search.subset.to_string() << "\n";
  } else if (type == "authority-public-keys") {
    os << "  attribute " << wire::decode<AuthorityPublicKeys>(ctx, text).attribute_id << "\n";
  } else if (type == "update-request") {
    const auto r = wire::decode<UpdateRequest>(ctx, text);
    os << "  record " << r.record_id << ", replaces:" << (r.sse ? " sse" : "") << (r.abe ? " abe" : "")
       << (r.recovery ? " recovery" : "") << (r.payload ? " payload" : "") << "\n";
  } else {
    os << "  (contents not shown)\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"escrow search and key recovery tool"};
  app.require_subcommand(1);
  app.add_option("--seed", g_seed, "hex seed for reproducible randomness");
  Options o;

  auto* s = app.add_subcommand("setup-server", "create a server home with n set keys");
  s->add_option("--home", o.home)->required();
  s->add_option("--sets", o.sets)->required()->check(CLI::PositiveNumber);
  s->add_option("--backend", o.backend)->check(CLI::IsMember({"oracle", "curve"}));
  s->add_option("--oracle-q", o.oracle_q, "prime group order for the oracle backend");

  auto* a = app.add_subcommand("setup-aa", "create an attribute authority");
  a->add_option("--home", o.home)->required();
  a->add_option("--server-home", o.server_home)->required();
  a->add_option("--attribute", o.attribute)->required();
  a->add_option("--member", o.members, "GIDs entitled to the attribute");

  auto* w = app.add_subcommand("setup-owner", "create a data owner");
  w->add_option("--home", o.home)->required();
  w->add_option("--server-home", o.server_home)->required();
  w->add_option("--owner-id", o.owner_id)->required();

  auto* p = app.add_subcommand("publish", "encrypt a file and store it");
  p->add_option("--home", o.home)->required();
  p->add_option("--server-home", o.server_home)->required();
  p->add_option("--in", o.in)->required()->check(CLI::ExistingFile);
  p->add_option("--keywords", o.keywords)->required()->delimiter(',');
  p->add_option("--policy", o.policy)->required()->delimiter(',');
  p->add_option("--aa-home", o.aa_homes);
  p->add_option("--set", o.set)->required();

  auto* c = app.add_subcommand("consent", "issue a search consent for a keyword and subset");
  c->add_option("--home", o.home)->required();
  c->add_option("--server-home", o.server_home)->required();
  c->add_option("--keyword", o.keyword)->required();
  c->add_option("--subset", o.subset)->required();
  c->add_option("--out", o.out)->required();

  auto* i = app.add_subcommand("issue", "request credentials from authorities");
  i->add_option("--home", o.home)->required();
  i->add_option("--server-home", o.server_home)->required();
  i->add_option("--gid", o.gid)->required();
  i->add_option("--aa-home", o.aa_homes)->required();

  auto* q = app.add_subcommand("search", "search the server with a consent");
  q->add_option("--home", o.home)->required();
  q->add_option("--server-home", o.server_home)->required();
  q->add_option("--consent", o.consent)->required()->check(CLI::ExistingFile);
  q->add_option("--out", o.out)->required();
  q->add_option("--request-out", o.request_out);
  q->add_option("--workers", o.workers);

  auto* d = app.add_subcommand("decrypt", "recover keys and decrypt a search response");
  d->add_option("--home", o.home)->required();
  d->add_option("--server-home", o.server_home)->required();
  d->add_option("--consent", o.consent)->required()->check(CLI::ExistingFile);
  d->add_option("--response", o.response)->required()->check(CLI::ExistingFile);
  d->add_option("--out-dir", o.out_dir)->required();

  auto* u = app.add_subcommand("update", "re-encrypt a record");
  u->add_option("--home", o.home)->required();
  u->add_option("--server-home", o.server_home)->required();
  u->add_option("--record", o.record)->required();
  u->add_option("--subset", o.subset)->required();
  u->add_option("--keywords", o.keywords)->delimiter(',');
  u->add_option("--policy", o.policy)->delimiter(',');
  u->add_option("--in", o.in)->check(CLI::ExistingFile);
  u->add_option("--aa-home", o.aa_homes);

  auto* n = app.add_subcommand("inspect", "print the structure of a message, state or store file");
  n->add_option("--file", o.file)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const std::pair<CLI::App*, int (*)(const Options&)> verbs[] = {
      {s, setup_server}, {a, setup_aa}, {w, setup_owner}, {p, publish}, {c, consent},
      {i, issue},        {q, search},   {d, decrypt},     {u, update},  {n, inspect}};
  try {
    for (const auto& [cmd, fn] : verbs)
      if (cmd->parsed()) {
        g_verb = cmd->get_name();
        return fn(o);
      }
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kProtocolError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kProtocolError;
  }
  return kUsage;
}
