import { GatewayClient } from "./api.js";
import type { SessionJson, SessionSettings } from "./types.js";

export interface ControllerSnapshot {
  session: SessionJson | null;
  error: Error | null;
  pending: boolean;
}

/**
 * Holds the one client-side copy of the session and funnels every user action
 * into exactly one gateway call. The reply replaces the session wholesale;
 * nothing is patched or recomputed locally.
 *
 * Only one mutation may be in flight at a time. An action started while
 * another is pending is refused before any request goes out (returns false).
 * Read-only refreshes bypass the lock but never overwrite state mid-mutation.
 */
export class WorkbenchController {
  private session: SessionJson | null = null;
  private lastError: Error | null = null;
  private pending = false;
  private readonly listeners: Array<() => void> = [];

  constructor(private readonly client: GatewayClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  snapshot(): ControllerSnapshot {
    return { session: this.session, error: this.lastError, pending: this.pending };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private async mutate(run: () => Promise<SessionJson>): Promise<boolean> {
    if (this.pending) {
      return false;
    }
    this.pending = true;
    this.lastError = null;
    this.emit();
    try {
      this.session = await run();
    } catch (error) {
      this.lastError = error instanceof Error ? error : new Error(String(error));
    } finally {
      this.pending = false;
      this.emit();
    }
    return true;
  }

  private sessionId(): string {
    if (this.session === null) {
      throw new Error("no active session");
    }
    return this.session.id;
  }

  create(nl: string, settings?: Partial<SessionSettings>): Promise<boolean> {
    return this.mutate(() => this.client.createSession(nl, settings));
  }

  /** Re-fetch without taking the mutation lock; used for resume and polling. */
  async refresh(sessionId: string): Promise<void> {
    try {
      const fetched = await this.client.getSession(sessionId);
      if (!this.pending) {
        this.session = fetched;
        this.lastError = null;
        this.emit();
      }
    } catch (error) {
      this.lastError = error instanceof Error ? error : new Error(String(error));
      this.emit();
    }
  }

  translate(): Promise<boolean> {
    return this.mutate(() => this.client.translate(this.sessionId()));
  }

  add(fragment: string, formulaText: string): Promise<boolean> {
    return this.mutate(() => this.client.addSubTranslation(this.sessionId(), fragment, formulaText));
  }

  edit(fragmentHash: string, formulaText: string): Promise<boolean> {
    return this.mutate(() =>
      this.client.editSubTranslation(this.sessionId(), fragmentHash, formulaText),
    );
  }

  remove(fragmentHash: string): Promise<boolean> {
    return this.mutate(() => this.client.deleteSubTranslation(this.sessionId(), fragmentHash));
  }

  select(target: string, index: number): Promise<boolean> {
    return this.mutate(() => this.client.selectAlternative(this.sessionId(), target, index));
  }

  approve(): Promise<boolean> {
    return this.mutate(() => this.client.approve(this.sessionId()));
  }
}
