// Transport replaying a recorded service session, verifying the client
// sends exactly the requests the recording expects.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Transport, TransportResult } from "../src/client";

export interface Exchange {
  method: string;
  path: string;
  body: unknown;
  status: number;
  response: unknown;
}

export function loadExchanges(name: string): Exchange[] {
  const here = dirname(fileURLToPath(import.meta.url));
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as Exchange[];
}

export class ReplayTransport {
  private cursor = 0;

  constructor(private readonly exchanges: Exchange[]) {}

  get transport(): Transport {
    return async (method, path, body): Promise<TransportResult> => {
      const expected = this.exchanges[this.cursor];
      if (!expected) {
        throw new Error(`unexpected request beyond recording: ${method} ${path}`);
      }
      if (expected.method !== method || expected.path !== path) {
        throw new Error(
          `request mismatch at #${this.cursor}: got ${method} ${path}, ` +
            `recorded ${expected.method} ${expected.path}`,
        );
      }
      if (expected.body !== null && JSON.stringify(body) !== JSON.stringify(expected.body)) {
        throw new Error(`body mismatch at #${this.cursor} for ${method} ${path}`);
      }
      this.cursor += 1;
      return { status: expected.status, body: expected.response };
    };
  }

  get exhausted(): boolean {
    return this.cursor === this.exchanges.length;
  }

  get position(): number {
    return this.cursor;
  }
}
