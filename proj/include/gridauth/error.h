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


#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridauth {

enum class ErrorCode {
  kInvalidArgument,
  kUnsupportedValue,
  kParseError,
  kIoError,
  // credential-core
  kNotAnAuthority,
  kWindowOutOfRange,
  kInvalidChain,
  // vo-registry
  kNotAuthorized,
  kCycleWouldForm,
  kDuplicateName,
  kUnknownScope,
  kUnknownEntity,
  kAlreadyDecided,
  kUnknownRequest,
  // attribute-authority
  kAuthenticationFailed,
  kReplayDetected,
  kUnknownUser,
  kUnauthorizedAttributes,
  kMalformedRequest,
  kTransportError,
  // proxy-tool
  kMalformedPayload,
  // site-enforcement
  kConfigError,
  kPluginFault,
  kUnknownMethod,
  // credential-mapping
  kPoolExhausted,
  kNoSuchLease,
  kNoMappingRule,
  // admin-compat
  kEndpointUnreachable,
  kMalformedConfig,
};

/// Stable wire name of an error code, e.g. "ReplayDetected".
std::string_view error_code_name(ErrorCode code);
/// Inverse of error_code_name; kInvalidArgument for unknown names.
ErrorCode error_code_from_name(std::string_view name);

/// The single exception type thrown by the library. `details` carries
/// structured extras, e.g. the offending FQANs of an UnauthorizedAttributes
/// rejection or the endpoint that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace gridauth
