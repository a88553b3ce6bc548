/** Wire shapes of the command/update channel, mirroring the server. */
export {};
