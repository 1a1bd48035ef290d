// Copyright 2026 The gridauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "gridauth/error.h"

#include <array>
#include <utility>

namespace gridauth {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 29> kNames{{
    {ErrorCode::kInvalidArgument, "InvalidArgument"},
    {ErrorCode::kUnsupportedValue, "UnsupportedValue"},
    {ErrorCode::kParseError, "ParseError"},
    {ErrorCode::kIoError, "IoError"},
    {ErrorCode::kNotAnAuthority, "NotAnAuthority"},
    {ErrorCode::kWindowOutOfRange, "WindowOutOfRange"},
    {ErrorCode::kInvalidChain, "InvalidChain"},
    {ErrorCode::kNotAuthorized, "NotAuthorized"},
    {ErrorCode::kCycleWouldForm, "CycleWouldForm"},
    {ErrorCode::kDuplicateName, "DuplicateName"},
    {ErrorCode::kUnknownScope, "UnknownScope"},
    {ErrorCode::kUnknownEntity, "UnknownEntity"},
    {ErrorCode::kAlreadyDecided, "AlreadyDecided"},
    {ErrorCode::kUnknownRequest, "UnknownRequest"},
    {ErrorCode::kAuthenticationFailed, "AuthenticationFailed"},
    {ErrorCode::kReplayDetected, "ReplayDetected"},
    {ErrorCode::kUnknownUser, "UnknownUser"},
    {ErrorCode::kUnauthorizedAttributes, "UnauthorizedAttributes"},
    {ErrorCode::kMalformedRequest, "MalformedRequest"},
    {ErrorCode::kTransportError, "TransportError"},
    {ErrorCode::kMalformedPayload, "MalformedPayload"},
    {ErrorCode::kConfigError, "ConfigError"},
    {ErrorCode::kPluginFault, "PluginFault"},
    {ErrorCode::kUnknownMethod, "UnknownMethod"},
    {ErrorCode::kPoolExhausted, "PoolExhausted"},
    {ErrorCode::kNoSuchLease, "NoSuchLease"},
    {ErrorCode::kNoMappingRule, "NoMappingRule"},
    {ErrorCode::kEndpointUnreachable, "EndpointUnreachable"},
    {ErrorCode::kMalformedConfig, "MalformedConfig"},
}};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

ErrorCode error_code_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace gridauth
