#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "cccn/coding.hpp"
#include "cccn/errors.hpp"

namespace cccn {

enum class Mode { ip, ccn, cccn };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::ip: return "IP";
    case Mode::ccn: return "CCN";
    default: return "CCCN";
  }
}

inline Mode parse_mode(const std::string& s) {
  if (s == "IP" || s == "ip") return Mode::ip;
  if (s == "CCN" || s == "ccn") return Mode::ccn;
  if (s == "CCCN" || s == "cccn") return Mode::cccn;
  throw ConfigError("unknown mode: " + s);
}

// I_Type: 0 = entire object, -1 = the I_Info segment set, x = segment x.
struct InterestPacket {
  std::string name;
  std::uint64_t content_id = 0;
  int i_type = 0;
  std::vector<int> i_info;  // sorted, present iff i_type == -1
  int hop_limit = 32;
  std::uint64_t nonce = 0;
  // The consumer request this interest descends from; constant through
  // rewrites and splits so custodians can meter coded service per request.
  std::uint64_t origin = 0;
  // Retransmissions ask for plain segments only; a lost coded substitution
  // must not be substituted again.
  bool plain_only = false;

  std::vector<int> wanted(int k) const {
    if (i_type == 0) {
      std::vector<int> all(k);
      for (int i = 0; i < k; ++i) all[i] = i;
      return all;
    }
    if (i_type == -1) return i_info;
    return {i_type};
  }
};

inline InterestPacket make_interest(std::string name, std::uint64_t content,
                                    const std::vector<int>& want, int k,
                                    int hop_limit, std::uint64_t nonce,
                                    bool plain_only = false) {
  InterestPacket p;
  p.name = std::move(name);
  p.content_id = content;
  p.hop_limit = hop_limit;
  p.nonce = nonce;
  p.plain_only = plain_only;
  if (static_cast<int>(want.size()) == k) {
    p.i_type = 0;
  } else if (want.size() == 1) {
    p.i_type = want[0];
    if (p.i_type < 0 || p.i_type >= k) throw InvalidParameters("segment id out of range");
  } else if (!want.empty()) {
    p.i_type = -1;
    p.i_info = want;
  } else {
    throw NothingLeft();
  }
  return p;
}

// Removes the satisfied part of the wanted set; single leftover segments
// collapse to the I_Type = x form. Name and nonce survive untouched.
inline InterestPacket modify_interest(const InterestPacket& pkt,
                                      const std::vector<int>& satisfied, int k) {
  std::vector<int> want = pkt.wanted(k);
  std::vector<int> remaining;
  for (int s : want) {
    bool hit = false;
    for (int t : satisfied)
      if (t == s) { hit = true; break; }
    if (!hit) remaining.push_back(s);
  }
  if (remaining.empty()) throw NothingLeft();
  InterestPacket out = make_interest(pkt.name, pkt.content_id, remaining, k,
                                     pkt.hop_limit, pkt.nonce, pkt.plain_only);
  out.origin = pkt.origin;
  return out;
}

// D_Type: 0 = plain payload (unit coding vector), -1 = encoded payload with
// the spanned segment ids in D_Info. Data packets always carry the full
// coding vector so the realized coefficients reach the decoding gateway.
struct DataPacket {
  std::string name;
  std::uint64_t content_id = 0;
  int d_type = 0;
  std::vector<int> d_info;  // spanned segment ids, sorted
  CodedSymbol symbol;
  long long accounting_size = 0;  // bytes booked against links

  static DataPacket from_symbol(std::string name, CodedSymbol sym, long long bytes) {
    DataPacket p;
    p.name = std::move(name);
    p.content_id = sym.content_id;
    p.accounting_size = bytes;
    int plain_seg = sym.plain_segment();
    if (plain_seg >= 0) {
      p.d_type = 0;
      p.d_info = {plain_seg};
    } else {
      p.d_type = -1;
      for (std::size_t i = 0; i < sym.coding_vector.size(); ++i)
        if (sym.coding_vector[i]) p.d_info.push_back(static_cast<int>(i));
    }
    p.symbol = std::move(sym);
    return p;
  }
};

namespace detail {

inline std::string id_set(const std::vector<int>& v) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

}  // namespace detail

// One-line trace forms following the fixed-header field order: version,
// packet length, hop limit, flags, header length, message type and length,
// name, then the optional type-specific TLVs.
inline std::string format_packet(const InterestPacket& p) {
  std::ostringstream os;
  std::size_t tlv = p.i_type == -1 ? 4 + 4 * p.i_info.size() : 4;
  std::size_t len = 8 + 4 + p.name.size() + tlv;
  os << "ver=1 len=" << len << " hop=" << p.hop_limit << " flags=0 hdrlen=8"
     << " msg=interest msglen=" << (len - 8) << " name=" << p.name
     << " I_Type=" << p.i_type;
  if (p.i_type == -1) os << " I_Info=" << detail::id_set(p.i_info);
  if (p.plain_only) os << " plain_only=1";
  os << " nonce=" << p.nonce;
  return os.str();
}

inline std::string format_packet(const DataPacket& p) {
  std::ostringstream os;
  std::size_t tlv = 4 + 4 * p.d_info.size() + 2 * p.symbol.coding_vector.size();
  std::size_t len = 8 + 4 + p.name.size() + tlv;
  os << "ver=1 len=" << len << " hop=0 flags=0 hdrlen=8"
     << " msg=data msglen=" << (len - 8) << " name=" << p.name
     << " D_Type=" << p.d_type << " D_Info=" << detail::id_set(p.d_info)
     << " bytes=" << p.accounting_size;
  return os.str();
}

}  // namespace cccn
