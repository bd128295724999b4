// Copyright 2026 The JPPF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* Built as C to keep the public header C-compatible. */
#include <stdio.h>
#include <string.h>

#include "jppf/jppf.h"

int main(int argc, char** argv) {
  if (argc < 2) return 2;
  if (jppf_abi_version() != JPPF_ABI_VERSION) return 1;

  jppf_taxonomy* t = NULL;
  if (jppf_taxonomy_load(argv[1], &t) != JPPF_OK) {
    fprintf(stderr, "%s\n", jppf_last_error());
    return 1;
  }
  jppf_label l = {24, 3, 2};
  uint32_t v = 0;
  if (jppf_encode_label(l, &v) != JPPF_OK || v != 402653954u) return 1;

  jppf_taxonomy* bad = NULL;
  if (jppf_taxonomy_parse("{\"stuff\": []}", &bad) != JPPF_ERR_TAXONOMY || bad != NULL) return 1;
  if (strlen(jppf_last_error()) == 0) return 1;

  jppf_taxonomy_free(t);
  puts("ok");
  return 0;
}
