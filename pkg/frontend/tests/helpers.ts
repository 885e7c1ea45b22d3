/** Node-side plumbing for tests: spawn the service, talk raw TCP. */

import { ChildProcess, spawn } from "node:child_process";
import net from "node:net";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { LineTransport } from "../src/client.js";
import { LineSplitter } from "../src/protocol.js";

const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");

export interface Service {
  port: number;
  proc: ChildProcess;
  stop(): void;
}

export function startService(): Promise<Service> {
  return new Promise((resolve, reject) => {
    const proc = spawn("python3", ["-m", "taskbits.cli", "serve", "--port", "0"], {
      cwd: REPO_ROOT,
      stdio: ["ignore", "pipe", "pipe"],
    });
    let out = "";
    let err = "";
    const timer = setTimeout(() => {
      proc.kill();
      reject(new Error(`service did not start: ${out} ${err}`));
    }, 15000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const m = out.match(/listening on 127\.0\.0\.1:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve({ port: parseInt(m[1]!, 10), proc, stop: () => proc.kill() });
      }
    });
    proc.stderr!.on("data", (chunk: Buffer) => {
      err += chunk.toString();
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early (${code}): ${err}`));
    });
  });
}

export class TcpTransport implements LineTransport {
  private readonly splitter = new LineSplitter();
  private lineCb: ((line: string) => void) | null = null;
  private closeCb: (() => void) | null = null;

  constructor(private readonly sock: net.Socket) {
    sock.on("data", (chunk: Buffer) => {
      for (const line of this.splitter.push(chunk.toString())) {
        this.lineCb?.(line);
      }
    });
    sock.on("close", () => this.closeCb?.());
    sock.on("error", () => this.closeCb?.());
  }

  send(line: string): void {
    this.sock.write(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.sock.destroy();
  }
}

export function connect(port: number): Promise<TcpTransport> {
  return new Promise((resolve, reject) => {
    const sock = net.createConnection({ host: "127.0.0.1", port }, () =>
      resolve(new TcpTransport(sock)),
    );
    sock.on("error", reject);
  });
}
