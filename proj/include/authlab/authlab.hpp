/*
 * Copyright (C) 2026 The authlab developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "authlab/attack.hpp"
#include "authlab/bigint.hpp"
#include "authlab/bytes.hpp"
#include "authlab/codec.hpp"
#include "authlab/ecc.hpp"
#include "authlab/errors.hpp"
#include "authlab/protocol.hpp"
#include "authlab/random.hpp"
#include "authlab/store.hpp"
#include "authlab/transport.hpp"
#include "authlab/wire.hpp"
