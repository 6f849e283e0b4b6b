/** In-process chat-completions mock used across the suites. */

import { createServer, type Server } from "node:http";
import { once } from "node:events";
import { AddressInfo } from "node:net";

export interface SeenRequest {
  body: any;
  authorization?: string;
}

export interface MockEndpoint {
  server: Server;
  baseUrl: string;
  seen: SeenRequest[];
  maxInFlight: () => number;
  close: () => Promise<void>;
}

export type Responder = (body: any) => { status?: number; content?: string; delayMs?: number };

export async function startMock(respond: Responder): Promise<MockEndpoint> {
  const seen: SeenRequest[] = [];
  let inFlight = 0;
  let maxInFlight = 0;
  const server = createServer((req, res) => {
    inFlight += 1;
    maxInFlight = Math.max(maxInFlight, inFlight);
    const chunks: Buffer[] = [];
    req.on("data", (c) => chunks.push(c));
    req.on("end", () => {
      const body = JSON.parse(Buffer.concat(chunks).toString("utf-8"));
      const auth = req.headers["authorization"];
      seen.push({ body, ...(auth ? { authorization: auth } : {}) });
      const out = respond(body);
      const finish = () => {
        inFlight -= 1;
        if (out.status && out.status !== 200) {
          res.writeHead(out.status);
          res.end("mock failure");
          return;
        }
        res.writeHead(200, { "content-type": "application/json" });
        res.end(JSON.stringify({ choices: [{ message: { content: out.content ?? "" } }] }));
      };
      if (out.delayMs) setTimeout(finish, out.delayMs);
      else finish();
    });
  });
  server.listen(0, "127.0.0.1");
  await once(server, "listening");
  const { port } = server.address() as AddressInfo;
  return {
    server,
    baseUrl: `http://127.0.0.1:${port}/v1`,
    seen,
    maxInFlight: () => maxInFlight,
    close: () =>
      new Promise<void>((resolve, reject) => {
        // fetch keeps pooled connections alive; close() alone would wait on them
        server.closeAllConnections();
        server.close((err) => (err ? reject(err) : resolve()));
      }),
  };
}

/** ceil(T/n) blocks, the last one padded with stops. */
export function chunkBlocks(actions: number[], n: number): number[][] {
  const blocks: number[][] = [];
  for (let k = 0; k < Math.ceil(actions.length / n); k++) {
    const block = actions.slice(k * n, (k + 1) * n);
    while (block.length < n) block.push(0);
    blocks.push(block);
  }
  return blocks;
}
